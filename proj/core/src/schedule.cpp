#include "pvqa/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace pvqa {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

double clip01(double s) { return std::clamp(s, 0.0, 1.0); }

std::string fmt(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

void check_unit(const std::string& name, double s, std::vector<std::string>& out) {
  if (!(s >= 0.0 && s <= 1.0)) {
    out.push_back(name + " = " + fmt(s) + ": s out of [0,1]");
  }
}

void check_horizon(double T, std::vector<std::string>& out) {
  if (!(T > 0.0) || !std::isfinite(T)) {
    out.push_back("T = " + fmt(T) + ": horizon must be positive");
  }
}

void push_segment(std::vector<ScheduleSegment>& out, double a, double b, double sa, double sb) {
  if (b > a) {
    out.push_back({a, b, sa, sb});
  }
}

}  // namespace

double ScheduleSegment::value_at(double t) const {
  if (s_begin == s_end) {
    return s_begin;
  }
  return s_begin + (s_end - s_begin) * (t - begin) / (end - begin);
}

double horizon(const Schedule& sch) {
  return std::visit([](const auto& s) { return s.horizon; }, sch);
}

double eval_s(const Schedule& sch, double t) {
  const double T = horizon(sch);
  // Grids like T * i / n can overshoot T by an ulp; such points are clamped.
  if (!(t >= 0.0 && t <= T * (1.0 + 1e-12))) {
    throw std::out_of_range("t = " + fmt(t) + " outside [0, " + fmt(T) + "]");
  }
  t = std::min(t, T);
  return std::visit(
      overloaded{
          [&](const ContinuousSchedule& c) {
            const auto m = c.values.size();
            if (m == 0) {
              throw std::invalid_argument("continuous schedule has no values");
            }
            auto k = static_cast<std::size_t>(std::floor(t / T * static_cast<double>(m)));
            return c.values[std::min(k, m - 1)];
          },
          [&](const LinearSchedule& l) { return l.s1 + (l.s2 - l.s1) * t / T; },
          [&](const QaoaSchedule& q) {
            double begin = 0.0;
            for (std::size_t i = 0; i < q.breakpoints.size(); ++i) {
              const double end = q.breakpoints[i];
              if (t >= begin && t < end) {
                return i % 2 == 0 ? 1.0 : 0.0;
              }
              begin = end;
            }
            return 0.0;
          },
          [&](const AnnealerSchedule& a) {
            const double t1 = 0.1 * T;
            const double t2 = 0.9 * T;
            if (t <= t1) {
              return a.s1 * t / t1;
            }
            if (t <= t2) {
              return a.s1 + (a.s2 - a.s1) * (t - t1) / (t2 - t1);
            }
            return a.s2 + (1.0 - a.s2) * (t - t2) / (T - t2);
          }},
      sch);
}

std::vector<std::string> validate(const Schedule& sch) {
  std::vector<std::string> out;
  std::visit(overloaded{[&](const ContinuousSchedule& c) {
                          check_horizon(c.horizon, out);
                          if (c.values.empty()) {
                            out.push_back("continuous schedule needs at least one value");
                          }
                          for (std::size_t i = 0; i < c.values.size(); ++i) {
                            check_unit("values[" + std::to_string(i) + "]", c.values[i], out);
                          }
                        },
                        [&](const LinearSchedule& l) {
                          check_horizon(l.horizon, out);
                          check_unit("s1", l.s1, out);
                          check_unit("s2", l.s2, out);
                        },
                        [&](const QaoaSchedule& q) {
                          check_horizon(q.horizon, out);
                          const auto& b = q.breakpoints;
                          if (b.empty() || b.size() % 2 != 0) {
                            out.push_back("QAOA schedule needs 2p breakpoints with p >= 1 (got " +
                                          std::to_string(b.size()) + ")");
                          }
                          double prev = 0.0;
                          for (std::size_t i = 0; i < b.size(); ++i) {
                            if (!(b[i] >= prev)) {
                              out.push_back(i == 0 ? "s_1 < 0"
                                                   : "s_" + std::to_string(i + 1) + " < s_" + std::to_string(i));
                            }
                            prev = b[i];
                          }
                          if (!b.empty() && b.back() > q.horizon) {
                            out.push_back("s_" + std::to_string(b.size()) + " > T");
                          }
                        },
                        [&](const AnnealerSchedule& a) {
                          check_horizon(a.horizon, out);
                          check_unit("s1", a.s1, out);
                          check_unit("s2", a.s2, out);
                        }},
             sch);
  return out;
}

Schedule clamp_project(const Schedule& sch) {
  return std::visit(overloaded{[](ContinuousSchedule c) -> Schedule {
                                 for (auto& v : c.values) {
                                   v = clip01(v);
                                 }
                                 return c;
                               },
                               [](LinearSchedule l) -> Schedule {
                                 l.s1 = clip01(l.s1);
                                 l.s2 = clip01(l.s2);
                                 return l;
                               },
                               [](QaoaSchedule q) -> Schedule {
                                 std::sort(q.breakpoints.begin(), q.breakpoints.end());
                                 for (auto& b : q.breakpoints) {
                                   b = std::clamp(b, 0.0, q.horizon);
                                 }
                                 return q;
                               },
                               [](AnnealerSchedule a) -> Schedule {
                                 a.s1 = clip01(a.s1);
                                 a.s2 = clip01(a.s2);
                                 return a;
                               }},
                    sch);
}

std::vector<ScheduleSegment> segments(const Schedule& sch) {
  std::vector<ScheduleSegment> out;
  std::visit(overloaded{[&](const ContinuousSchedule& c) {
                          const auto m = c.values.size();
                          for (std::size_t k = 0; k < m; ++k) {
                            const double a = c.horizon * static_cast<double>(k) / static_cast<double>(m);
                            const double b = c.horizon * static_cast<double>(k + 1) / static_cast<double>(m);
                            push_segment(out, a, b, c.values[k], c.values[k]);
                          }
                        },
                        [&](const LinearSchedule& l) { push_segment(out, 0.0, l.horizon, l.s1, l.s2); },
                        [&](const QaoaSchedule& q) {
                          double begin = 0.0;
                          for (std::size_t i = 0; i < q.breakpoints.size(); ++i) {
                            const double s = i % 2 == 0 ? 1.0 : 0.0;
                            push_segment(out, begin, q.breakpoints[i], s, s);
                            begin = std::max(begin, q.breakpoints[i]);
                          }
                        },
                        [&](const AnnealerSchedule& a) {
                          const double T = a.horizon;
                          push_segment(out, 0.0, 0.1 * T, 0.0, a.s1);
                          push_segment(out, 0.1 * T, 0.9 * T, a.s1, a.s2);
                          push_segment(out, 0.9 * T, T, a.s2, 1.0);
                        }},
             sch);
  return out;
}

std::string schedule_kind(const Schedule& sch) {
  return std::visit(overloaded{[](const ContinuousSchedule&) { return std::string("continuous"); },
                               [](const LinearSchedule&) { return std::string("linear"); },
                               [](const QaoaSchedule&) { return std::string("qaoa"); },
                               [](const AnnealerSchedule&) { return std::string("annealer"); }},
                    sch);
}

void to_json(nlohmann::json& j, const Schedule& sch) {
  std::visit(overloaded{[&](const ContinuousSchedule& c) {
                          j = nlohmann::json{{"kind", "continuous"}, {"values", c.values}, {"T", c.horizon}};
                        },
                        [&](const LinearSchedule& l) {
                          j = nlohmann::json{{"kind", "linear"}, {"s1", l.s1}, {"s2", l.s2}, {"T", l.horizon}};
                        },
                        [&](const QaoaSchedule& q) {
                          j = nlohmann::json{{"kind", "qaoa"}, {"breakpoints", q.breakpoints}, {"T", q.horizon}};
                        },
                        [&](const AnnealerSchedule& a) {
                          j = nlohmann::json{{"kind", "annealer"}, {"s1", a.s1}, {"s2", a.s2}, {"T", a.horizon}};
                        }},
             sch);
}

Schedule schedule_from_json(const nlohmann::json& j) {
  const auto kind = j.at("kind").get<std::string>();
  const double T = j.at("T").get<double>();
  if (kind == "continuous") {
    return ContinuousSchedule{j.at("values").get<std::vector<double>>(), T};
  }
  if (kind == "linear") {
    return LinearSchedule{j.at("s1").get<double>(), j.at("s2").get<double>(), T};
  }
  if (kind == "qaoa") {
    return QaoaSchedule{j.at("breakpoints").get<std::vector<double>>(), T};
  }
  if (kind == "annealer") {
    return AnnealerSchedule{j.at("s1").get<double>(), j.at("s2").get<double>(), T};
  }
  throw std::invalid_argument("unknown schedule kind '" + kind + "'");
}

}  // namespace pvqa
