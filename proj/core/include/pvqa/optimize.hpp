#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace pvqa {

/// Scalar objective over a box. Every evaluation first clamps into the box and
/// then applies the optional projection; the projected point is what the
/// callable sees.
class ObjectiveFn {
 public:
  using Callable = std::function<double(std::span<const double>)>;
  using Projection = std::function<std::vector<double>(std::span<const double>)>;

  ObjectiveFn(Callable f, std::vector<double> lo, std::vector<double> hi, Projection projection = {});

  double operator()(std::span<const double> x);
  std::vector<double> project(std::span<const double> x) const;

  std::size_t dimension() const { return lo_.size(); }
  const std::vector<double>& lower() const { return lo_; }
  const std::vector<double>& upper() const { return hi_; }
  std::size_t evaluations() const { return evaluations_; }

 private:
  Callable f_;
  std::vector<double> lo_;
  std::vector<double> hi_;
  Projection projection_;
  std::size_t evaluations_ = 0;
};

struct TracePoint {
  std::size_t iteration = 0;
  std::vector<double> params;
  double value = 0.0;
};

struct OptimizeResult {
  std::vector<double> best_params;  // already projected
  double best_value = 0.0;
  std::size_t evaluations = 0;
  std::size_t iterations = 0;
  std::vector<TracePoint> trace;  // best-so-far after each iteration, iteration 0 = start
};

/// Powell's conjugate-direction method with bounded Brent line searches
/// (xtol 1e-4, at most 50 probes each). `max_iter` counts outer iterations.
OptimizeResult powell_minimize(ObjectiveFn& f, std::span<const double> x0, std::size_t max_iter);

/// Exhaustive lattice {lo, lo + res, ..., hi} per parameter, endpoints included.
/// Ties go to the lexicographically smallest point.
OptimizeResult grid_search(ObjectiveFn& f, double resolution);

/// Projected descent from the constant-0.5 vector with central finite
/// differences (h = 1e-4). Steps move along the gradient scaled to unit
/// infinity norm, with backtracking from 0.1 down to 1e-6. Stops when the
/// projected gradient falls below 1e-5 in infinity norm or no step decreases f.
OptimizeResult continuous_gradient_descent(ObjectiveFn& f, std::size_t max_iter);

/// `iteration,p0,p1,...,value`.
void write_trace_csv(std::ostream& out, const OptimizeResult& r);

}  // namespace pvqa
