#pragma once

// Device, frequency and cluster-size what-ifs built from measured or modeled
// task profiles.

#include <string>
#include <string_view>
#include <vector>

#include "greenflow/ci.hpp"
#include "greenflow/trace.hpp"

namespace greenflow {

enum class ProfileSource { measured, modeled };

std::string_view to_string(ProfileSource s);

struct TaskProfile {
  std::string label;
  double runtime_s = 0.0;
  double energy_kwh = 0.0;
  ProfileSource source = ProfileSource::measured;
};

/// CSV with header label,runtime_s,energy_kwh,source.
std::vector<TaskProfile> parse_profiles(std::string_view content);

/// Emissions of running the profile at `start`: energy spread uniformly over
/// [start, start + runtime).
double profile_emissions(const TaskProfile& profile, Instant start,
                         const CISeries& series);

struct ProfileRanking {
  TaskProfile profile;
  double emissions_g = 0.0;
  bool feasible = true;  // false when the run leaves CI coverage
  std::string note;
};

/// Ranks profiles for a common start time: feasible profiles first, by
/// emissions, then shorter runtime, then label. Profiles that leave CI
/// coverage are flagged rather than fatal.
std::vector<ProfileRanking> compare_profiles(
    const std::vector<TaskProfile>& profiles, Instant start,
    const CISeries& series);

/// compare_profiles for a set of frequency operating points of one device;
/// labels carry the frequency.
std::vector<ProfileRanking> frequency_sweep(
    const std::vector<TaskProfile>& points, Instant start,
    const CISeries& series);

struct ScaleRun {
  int node_count = 0;
  WorkflowTrace trace;
};

struct ScaleRow {
  int node_count = 0;
  std::string label;
  double makespan_h = 0.0;
  double energy_kwh = 0.0;
  double avg_emissions_g = 0.0;
  double marg_emissions_g = 0.0;
};

/// One row per run: makespan, energy, and footprint under the average and
/// marginal signals, ordered by node count.
std::vector<ScaleRow> cluster_scale_report(const std::vector<ScaleRun>& runs,
                                           const CISeries& average,
                                           const CISeries& marginal,
                                           double pue = 1.0);

}  // namespace greenflow
