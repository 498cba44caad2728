#pragma once

namespace greenflow {

// Kahan compensated summation; used for every reported total so that
// summation error stays independent of task count.
class KahanSum {
 public:
  void add(double x) {
    double y = x - c_;
    double t = sum_ + y;
    c_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double c_ = 0.0;
};

}  // namespace greenflow
