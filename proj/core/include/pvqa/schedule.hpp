#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace pvqa {

/// Piecewise-constant path on M equal sub-intervals of [0, T].
struct ContinuousSchedule {
  std::vector<double> values;
  double horizon = 1.0;
};

/// s(t) = s1 + (s2 - s1) t / T.
struct LinearSchedule {
  double s1 = 0.0;
  double s2 = 1.0;
  double horizon = 1.0;
};

/// Bang-bang path: s = 1 on [b_{2l-2}, b_{2l-1}), s = 0 on [b_{2l-1}, b_{2l}), with b_0 = 0.
/// Nothing evolves on [b_{2p}, T].
struct QaoaSchedule {
  std::vector<double> breakpoints;  // b_1 .. b_{2p}
  double horizon = 1.0;

  std::size_t layers() const { return breakpoints.size() / 2; }
};

/// Annealer-style path through (0, 0), (0.1T, s1), (0.9T, s2), (T, 1).
struct AnnealerSchedule {
  double s1 = 0.5;
  double s2 = 0.5;
  double horizon = 1.0;
};

using Schedule = std::variant<ContinuousSchedule, LinearSchedule, QaoaSchedule, AnnealerSchedule>;

/// Interval of the path over which s is affine (constant pieces included).
struct ScheduleSegment {
  double begin = 0.0;
  double end = 0.0;
  double s_begin = 0.0;
  double s_end = 0.0;

  double value_at(double t) const;
};

double horizon(const Schedule& sch);

/// Throws std::out_of_range when t lies outside [0, T].
double eval_s(const Schedule& sch, double t);

/// Every violated invariant, human readable; empty when valid.
std::vector<std::string> validate(const Schedule& sch);

/// Clips s values to [0, 1]; QAOA breakpoints are sorted and clipped to [0, T].
Schedule clamp_project(const Schedule& sch);

/// Affine pieces covering the time actually evolved ([0, T], or [0, b_{2p}] for QAOA).
/// Zero-length pieces are omitted.
std::vector<ScheduleSegment> segments(const Schedule& sch);

std::string schedule_kind(const Schedule& sch);

void to_json(nlohmann::json& j, const Schedule& sch);
Schedule schedule_from_json(const nlohmann::json& j);

}  // namespace pvqa
