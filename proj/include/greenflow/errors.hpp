#pragma once

// Exception hierarchy. Every throwing path in the library raises a subclass
// of Error; kind() carries a stable machine-readable tag that the CLI echoes
// in its error output.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace greenflow {

class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

struct MissingColumn : Error {
  explicit MissingColumn(const std::string& col)
      : Error("MissingColumn", "missing required column: " + col), column(col) {}
  std::string column;
};

struct UnparseableRow : Error {
  UnparseableRow(std::size_t line, const std::string& why)
      : Error("UnparseableRow",
              "line " + std::to_string(line) + ": " + why),
        line_no(line),
        reason(why) {}
  std::size_t line_no;
  std::string reason;
};

struct UnknownNode : Error {
  explicit UnknownNode(const std::string& id)
      : Error("UnknownNode", "node '" + id + "' is not in the roster"),
        node_id(id) {}
  std::string node_id;
};

struct EmptyTrace : Error {
  EmptyTrace() : Error("EmptyTrace", "trace contains no tasks") {}
};

struct NonUniformInterval : Error {
  explicit NonUniformInterval(const std::string& at)
      : Error("NonUniformInterval",
              "carbon-intensity series is not uniformly spaced at " + at) {}
};

struct NegativeIntensity : Error {
  explicit NegativeIntensity(const std::string& at)
      : Error("NegativeIntensity", "negative carbon intensity at " + at) {}
};

struct EmptyCISeries : Error {
  explicit EmptyCISeries(const std::string& why = "carbon-intensity series is empty")
      : Error("EmptyCISeries", why) {}
};

struct OutOfRange : Error {
  explicit OutOfRange(const std::string& why) : Error("OutOfRange", why) {}
};

struct NoFeasibleOffset : Error {
  NoFeasibleOffset()
      : Error("NoFeasibleOffset",
              "carbon-intensity coverage excludes every candidate offset") {}
};

struct InsufficientSlots : Error {
  InsufficientSlots(std::size_t needed, std::size_t available)
      : Error("InsufficientSlots",
              "need " + std::to_string(needed) + " slots but only " +
                  std::to_string(available) + " lie within the window"),
        needed(needed),
        available(available) {}
  std::size_t needed;
  std::size_t available;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& why) : Error("ConfigError", why) {}
};

struct IoError : Error {
  explicit IoError(const std::string& why) : Error("IoError", why) {}
};

}  // namespace greenflow
