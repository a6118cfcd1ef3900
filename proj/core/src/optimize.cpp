#include "pvqa/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace pvqa {

namespace {

constexpr double kLineXtol = 1e-4;
constexpr std::size_t kLineMaxProbes = 50;
constexpr double kRelativeTol = 1e-6;

double sign_or_one(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 1.0); }

// Tracks the best point ever evaluated so the result is never worse than any probe.
struct Tracker {
  ObjectiveFn& f;
  std::vector<double> best_x;
  double best_f = std::numeric_limits<double>::infinity();

  double operator()(std::span<const double> x) {
    const double v = f(x);
    if (v < best_f) {
      best_f = v;
      best_x = f.project(x);
    }
    return v;
  }
};

struct LineResult {
  double alpha;
  double value;
};

// Bounded Brent minimisation of phi on [a, b] (golden section with parabolic
// steps). Endpoints are approached to within the tolerance but never probed.
template <typename Phi>
LineResult bounded_brent(Phi&& phi, double a, double b) {
  const double sqrt_eps = std::sqrt(std::numeric_limits<double>::epsilon());
  const double golden = 0.5 * (3.0 - std::sqrt(5.0));
  double fulc = a + golden * (b - a);
  double nfc = fulc;
  double xf = fulc;
  double rat = 0.0;
  double e = 0.0;
  double fx = phi(xf);
  std::size_t probes = 1;
  double ffulc = fx;
  double fnfc = fx;
  double xm = 0.5 * (a + b);
  double tol1 = sqrt_eps * std::abs(xf) + kLineXtol / 3.0;
  double tol2 = 2.0 * tol1;

  while (std::abs(xf - xm) > tol2 - 0.5 * (b - a) && probes < kLineMaxProbes) {
    bool use_golden = true;
    if (std::abs(e) > tol1) {
      use_golden = false;
      double r = (xf - nfc) * (fx - ffulc);
      double q = (xf - fulc) * (fx - fnfc);
      double p = (xf - fulc) * q - (xf - nfc) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) {
        p = -p;
      }
      q = std::abs(q);
      r = e;
      e = rat;
      if (std::abs(p) < std::abs(0.5 * q * r) && p > q * (a - xf) && p < q * (b - xf)) {
        rat = p / q;
        const double x = xf + rat;
        if ((x - a) < tol2 || (b - x) < tol2) {
          rat = tol1 * sign_or_one(xm - xf);
        }
      } else {
        use_golden = true;
      }
    }
    if (use_golden) {
      e = xf >= xm ? a - xf : b - xf;
      rat = golden * e;
    }
    const double x = xf + sign_or_one(rat) * std::max(std::abs(rat), tol1);
    const double fu = phi(x);
    ++probes;
    if (fu <= fx) {
      if (x >= xf) {
        a = xf;
      } else {
        b = xf;
      }
      fulc = nfc;
      ffulc = fnfc;
      nfc = xf;
      fnfc = fx;
      xf = x;
      fx = fu;
    } else {
      if (x < xf) {
        a = x;
      } else {
        b = x;
      }
      if (fu <= fnfc || nfc == xf) {
        fulc = nfc;
        ffulc = fnfc;
        nfc = x;
        fnfc = fu;
      } else if (fu <= ffulc || fulc == xf || fulc == nfc) {
        fulc = x;
        ffulc = fu;
      }
    }
    xm = 0.5 * (a + b);
    tol1 = sqrt_eps * std::abs(xf) + kLineXtol / 3.0;
    tol2 = 2.0 * tol1;
  }
  return {xf, fx};
}

// Admissible step range [lo, hi] keeping x + alpha * d inside the box.
std::pair<double, double> step_range(const ObjectiveFn& f, const std::vector<double>& x,
                                     const std::vector<double>& d) {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (d[k] == 0.0) {
      continue;
    }
    const double t1 = (f.lower()[k] - x[k]) / d[k];
    const double t2 = (f.upper()[k] - x[k]) / d[k];
    lo = std::max(lo, std::min(t1, t2));
    hi = std::min(hi, std::max(t1, t2));
  }
  return {lo, hi};
}

std::vector<double> axpy(const std::vector<double>& x, double alpha, const std::vector<double>& d) {
  std::vector<double> out(x);
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] += alpha * d[k];
  }
  return out;
}

// Moves x along d to the line minimum if it strictly improves on fx.
void line_minimize(Tracker& tr, std::vector<double>& x, double& fx, const std::vector<double>& d) {
  if (std::all_of(d.begin(), d.end(), [](double v) { return v == 0.0; })) {
    return;
  }
  const auto [lo, hi] = step_range(tr.f, x, d);
  if (!(hi - lo > kLineXtol)) {
    return;
  }
  const auto res = bounded_brent([&](double alpha) { return tr(axpy(x, alpha, d)); }, lo, hi);
  if (res.value < fx) {
    x = axpy(x, res.alpha, d);
    fx = res.value;
  }
}

void check_inside(const ObjectiveFn& f, std::span<const double> x) {
  if (x.size() != f.dimension()) {
    throw std::invalid_argument("initial point has " + std::to_string(x.size()) + " parameters, expected " +
                                std::to_string(f.dimension()));
  }
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(x[k] >= f.lower()[k] && x[k] <= f.upper()[k])) {
      throw std::invalid_argument("initial point outside bounds at parameter " + std::to_string(k));
    }
  }
}

}  // namespace

ObjectiveFn::ObjectiveFn(Callable f, std::vector<double> lo, std::vector<double> hi, Projection projection)
    : f_(std::move(f)), lo_(std::move(lo)), hi_(std::move(hi)), projection_(std::move(projection)) {
  if (lo_.size() != hi_.size()) {
    throw std::invalid_argument("bounds have mismatched dimensions");
  }
  for (std::size_t k = 0; k < lo_.size(); ++k) {
    if (!(lo_[k] <= hi_[k])) {
      throw std::invalid_argument("empty bound interval at parameter " + std::to_string(k));
    }
  }
}

std::vector<double> ObjectiveFn::project(std::span<const double> x) const {
  std::vector<double> y(x.begin(), x.end());
  for (std::size_t k = 0; k < y.size(); ++k) {
    y[k] = std::clamp(y[k], lo_[k], hi_[k]);
  }
  return projection_ ? projection_(y) : y;
}

double ObjectiveFn::operator()(std::span<const double> x) {
  if (x.size() != dimension()) {
    throw std::invalid_argument("objective expects " + std::to_string(dimension()) + " parameters");
  }
  const auto y = project(x);
  ++evaluations_;
  return f_(y);
}

OptimizeResult powell_minimize(ObjectiveFn& f, std::span<const double> x0, std::size_t max_iter) {
  if (max_iter == 0) {
    throw std::invalid_argument("max_iter must be at least 1");
  }
  check_inside(f, x0);
  const std::size_t dim = f.dimension();
  const std::size_t evals_before = f.evaluations();
  Tracker tr{f, {}, std::numeric_limits<double>::infinity()};

  std::vector<double> x(x0.begin(), x0.end());
  double fval = tr(x);
  OptimizeResult out;
  out.trace.push_back({0, tr.best_x, tr.best_f});

  std::vector<std::vector<double>> directions(dim, std::vector<double>(dim, 0.0));
  for (std::size_t k = 0; k < dim; ++k) {
    directions[k][k] = 1.0;
  }

  std::size_t iter = 0;
  while (true) {
    const double f_start = fval;
    const std::vector<double> x_start = x;
    std::size_t big = 0;
    double delta = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      const double before = fval;
      line_minimize(tr, x, fval, directions[k]);
      if (before - fval > delta) {
        delta = before - fval;
        big = k;
      }
    }
    ++iter;
    out.trace.push_back({iter, tr.best_x, tr.best_f});
    if (2.0 * (f_start - fval) <= kRelativeTol * (std::abs(f_start) + std::abs(fval)) + 1e-20 || iter >= max_iter) {
      break;
    }
    std::vector<double> d(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      d[k] = x[k] - x_start[k];
    }
    const auto [lo, hi] = step_range(f, x, d);
    (void)lo;
    const auto x_ext = axpy(x, std::min(1.0, hi), d);
    const double f_ext = tr(x_ext);
    if (f_start > f_ext) {
      double t = 2.0 * (f_start + f_ext - 2.0 * fval);
      const double a = f_start - fval - delta;
      const double b = f_start - f_ext;
      t = t * a * a - delta * b * b;
      if (t < 0.0) {
        line_minimize(tr, x, fval, d);
        directions[big] = directions.back();
        directions.back() = d;
      }
    }
  }

  out.best_params = tr.best_x;
  out.best_value = tr.best_f;
  out.evaluations = f.evaluations() - evals_before;
  out.iterations = iter;
  return out;
}

OptimizeResult grid_search(ObjectiveFn& f, double resolution) {
  if (!(resolution > 0.0)) {
    throw std::invalid_argument("grid resolution must be positive");
  }
  const std::size_t dim = f.dimension();
  if (dim == 0 || dim > 3) {
    throw std::invalid_argument("grid search supports 1 to 3 parameters (got " + std::to_string(dim) + ")");
  }
  std::vector<std::vector<double>> axes(dim);
  double total = 1.0;
  for (std::size_t k = 0; k < dim; ++k) {
    const double lo = f.lower()[k];
    const double hi = f.upper()[k];
    const double span = (hi - lo) / resolution;
    if (span > 1e6) {
      throw std::invalid_argument("grid lattice exceeds 1000000 points");
    }
    const auto steps = static_cast<std::size_t>(std::floor(span + 1e-9));
    for (std::size_t i = 0; i <= steps; ++i) {
      axes[k].push_back(lo + static_cast<double>(i) * resolution);
    }
    // The last lattice point is hi itself when it lies within rounding of it.
    if (hi - axes[k].back() > 1e-9 * std::max(1.0, std::abs(hi))) {
      axes[k].push_back(hi);
    } else {
      axes[k].back() = hi;
    }
    total *= static_cast<double>(axes[k].size());
  }
  if (total > 1e6) {
    throw std::invalid_argument("grid lattice exceeds 1000000 points");
  }

  const std::size_t evals_before = f.evaluations();
  OptimizeResult out;
  out.best_value = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> idx(dim, 0);
  std::vector<double> x(dim);
  while (true) {
    for (std::size_t k = 0; k < dim; ++k) {
      x[k] = axes[k][idx[k]];
    }
    const double v = f(x);
    if (v < out.best_value) {
      out.best_value = v;
      out.best_params = f.project(x);
    }
    // Odometer with the first parameter varying slowest.
    std::size_t k = dim;
    while (k > 0) {
      --k;
      if (++idx[k] < axes[k].size()) {
        break;
      }
      idx[k] = 0;
      if (k == 0) {
        k = dim + 1;
        break;
      }
    }
    if (k == dim + 1) {
      break;
    }
  }
  out.evaluations = f.evaluations() - evals_before;
  out.iterations = 1;
  out.trace.push_back({1, out.best_params, out.best_value});
  return out;
}

OptimizeResult continuous_gradient_descent(ObjectiveFn& f, std::size_t max_iter) {
  constexpr double h = 1e-4;
  constexpr double grad_tol = 1e-5;
  constexpr double initial_step = 0.1;
  constexpr double min_step = 1e-6;

  const std::size_t m = f.dimension();
  if (m < 2) {
    throw std::invalid_argument("continuous schedule needs at least 2 values");
  }
  auto eval = [&](std::span<const double> x) {
    const double v = f(x);
    if (!std::isfinite(v)) {
      throw std::domain_error("non-finite objective value");
    }
    return v;
  };

  const std::size_t evals_before = f.evaluations();
  std::vector<double> x = f.project(std::vector<double>(m, 0.5));
  double fx = eval(x);
  OptimizeResult out;
  out.trace.push_back({0, x, fx});

  std::size_t iter = 0;
  std::vector<double> grad(m);
  while (iter < max_iter) {
    ++iter;
    for (std::size_t k = 0; k < m; ++k) {
      auto xp = x;
      auto xm = x;
      xp[k] = std::min(x[k] + h, f.upper()[k]);
      xm[k] = std::max(x[k] - h, f.lower()[k]);
      grad[k] = (eval(xp) - eval(xm)) / (xp[k] - xm[k]);
    }
    double norm = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const bool blocked = (x[k] <= f.lower()[k] && grad[k] > 0.0) || (x[k] >= f.upper()[k] && grad[k] < 0.0);
      if (!blocked) {
        norm = std::max(norm, std::abs(grad[k]));
      }
    }
    if (norm < grad_tol) {
      out.trace.push_back({iter, x, fx});
      break;
    }
    bool moved = false;
    for (double step = initial_step; step >= min_step; step *= 0.5) {
      auto candidate = x;
      for (std::size_t k = 0; k < m; ++k) {
        candidate[k] -= step * grad[k] / norm;
      }
      candidate = f.project(candidate);
      const double fc = eval(candidate);
      if (fc < fx) {
        x = std::move(candidate);
        fx = fc;
        moved = true;
        break;
      }
    }
    out.trace.push_back({iter, x, fx});
    if (!moved) {
      break;
    }
  }
  out.best_params = x;
  out.best_value = fx;
  out.evaluations = f.evaluations() - evals_before;
  out.iterations = iter;
  return out;
}

void write_trace_csv(std::ostream& out, const OptimizeResult& r) {
  const std::size_t dim = r.trace.empty() ? 0 : r.trace.front().params.size();
  out << "iteration";
  for (std::size_t k = 0; k < dim; ++k) {
    out << ",p" << k;
  }
  out << ",value\n";
  const auto old_precision = out.precision(17);
  for (const auto& t : r.trace) {
    out << t.iteration;
    for (double p : t.params) {
      out << ',' << p;
    }
    out << ',' << t.value << '\n';
  }
  out.precision(old_precision);
}

}  // namespace pvqa
