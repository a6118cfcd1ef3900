#include "pvqa/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

#include <nlohmann/json.hpp>

namespace pvqa {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

double penalty_of(std::int64_t sum, std::int64_t b_min, std::int64_t b_max) {
  return static_cast<double>(std::max<std::int64_t>({0, sum - b_max, b_min - sum}));
}

// Descent state: configuration, local fields g_i = q_ii + sum_j q_ij x_j and
// the constraint sum.
struct Descent {
  const RepairModel& rm;
  std::vector<std::uint8_t> x;
  std::vector<double> field;
  std::int64_t sum = 0;

  Descent(const RepairModel& model, const SpinConfig& start) : rm(model), x(start.bits()), field(model.linear()) {
    const auto& nb = rm.neighbors();
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i]) {
        sum += rm.coefficients()[i];
        for (const auto& [j, w] : nb[i]) {
          field[j] += w;
        }
      }
    }
  }

  double flip_delta(std::size_t i) const {
    const double dir = x[i] ? -1.0 : 1.0;
    const std::int64_t a = rm.coefficients()[i];
    const std::int64_t next = x[i] ? sum - a : sum + a;
    return dir * field[i] +
           rm.a_prime() * (penalty_of(next, rm.b_min(), rm.b_max()) - penalty_of(sum, rm.b_min(), rm.b_max()));
  }

  void flip(std::size_t i) {
    const double dir = x[i] ? -1.0 : 1.0;
    sum += x[i] ? -rm.coefficients()[i] : rm.coefficients()[i];
    x[i] ^= 1U;
    for (const auto& [j, w] : rm.neighbors()[i]) {
      field[j] += dir * w;
    }
  }

  // Index of the steepest strictly improving flip, if any.
  std::optional<std::size_t> best_flip() const {
    std::optional<std::size_t> best;
    double best_delta = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = flip_delta(i);
      if (d < best_delta) {
        best_delta = d;
        best = i;
      }
    }
    return best;
  }
};

std::uint64_t iteration_guard(std::size_t n) {
  return n >= 63 ? std::numeric_limits<std::uint64_t>::max() : (std::uint64_t{1} << n);
}

template <typename OnFlip>
SpinConfig descend(const RepairModel& rm, const SpinConfig& start, OnFlip&& on_flip) {
  if (start.size() != rm.n()) {
    throw std::invalid_argument("dimension mismatch between repair model and configuration");
  }
  Descent state(rm, start);
  const std::uint64_t guard = iteration_guard(rm.n());
  for (std::uint64_t iter = 0;; ++iter) {
    const auto best = state.best_flip();
    if (!best) {
      break;
    }
    if (iter >= guard) {
      throw std::logic_error("greedy repair exceeded 2^n iterations");
    }
    state.flip(*best);
    on_flip(*best, state);
  }
  return SpinConfig(std::move(state.x));
}

}  // namespace

RepairModel::RepairModel(Qubo objective, ConstraintSpec constraint, double a_prime)
    : objective_(std::move(objective)), constraint_(std::move(constraint)), a_prime_(a_prime) {
  if (constraint_.n != objective_.n()) {
    throw std::invalid_argument("dimension mismatch between objective and constraint");
  }
  constraint_.check_conditions();
  const double bound = delta_q_bound(objective_);
  if (!(a_prime_ > bound)) {
    throw std::domain_error("condition 1 violated: A' must exceed the single-flip bound " + std::to_string(bound));
  }
  const std::size_t n = objective_.n();
  neighbors_.resize(n);
  linear_.assign(n, 0.0);
  for (const auto& [i, v] : objective_.linear()) {
    linear_[i] = v;
  }
  for (const auto& [key, v] : objective_.quadratic()) {
    neighbors_[key.first].push_back({key.second, v});
    neighbors_[key.second].push_back({key.first, v});
  }
  std::visit(overloaded{[&](const KHotConstraint& k) {
                          coefficients_.assign(n, 0);
                          for (auto i : k.subset) {
                            coefficients_[i] = 1;
                          }
                          b_min_ = b_max_ = static_cast<std::int64_t>(k.k);
                        },
                        [&](const InequalityConstraint& ineq) {
                          coefficients_ = ineq.coefficients;
                          b_min_ = ineq.b_min;
                          b_max_ = ineq.b_max;
                        }},
             constraint_.kind);
}

double RepairModel::energy(const SpinConfig& x) const {
  return eval_qubo(objective_, x) + a_prime_ * linear_penalty(constraint_, x);
}

double linear_penalty(const ConstraintSpec& c, const SpinConfig& x) {
  const auto s = c.weighted_sum(x);
  return std::visit(
      overloaded{[&](const KHotConstraint& k) { return std::abs(static_cast<double>(s - static_cast<std::int64_t>(k.k))); },
                 [&](const InequalityConstraint& ineq) { return penalty_of(s, ineq.b_min, ineq.b_max); }},
      c.kind);
}

double delta_q_bound(const Qubo& q) {
  std::vector<double> row(q.n(), 0.0);
  for (const auto& [i, v] : q.linear()) {
    row[i] += std::abs(v);
  }
  for (const auto& [key, v] : q.quadratic()) {
    row[key.first] += std::abs(v);
    row[key.second] += std::abs(v);
  }
  return row.empty() ? 0.0 : *std::max_element(row.begin(), row.end());
}

double default_a_prime(const Qubo& q) {
  constexpr double eps = 1e-6;
  return delta_q_bound(q) * (1.0 + eps) + eps;
}

RepairModel make_repair_model(const Qubo& objective, const ConstraintSpec& constraint) {
  return RepairModel(objective, constraint, default_a_prime(objective));
}

SpinConfig greedy_repair(const RepairModel& rm, const SpinConfig& x) {
  return descend(rm, x, [](std::size_t, const Descent&) {});
}

RepairTrace greedy_repair_traced(const RepairModel& rm, const SpinConfig& x) {
  RepairTrace trace;
  trace.input = x;
  trace.energies.push_back(rm.energy(x));
  trace.output = descend(rm, x, [&](std::size_t i, const Descent& state) {
    trace.flips.push_back(i);
    trace.energies.push_back(rm.energy(SpinConfig(state.x)));
  });
  return trace;
}

std::vector<std::uint64_t> repair_table(const RepairModel& rm) {
  const std::size_t n = rm.n();
  if (n > kMaxDenseVariables) {
    throw std::invalid_argument("repair table limited to n <= " + std::to_string(kMaxDenseVariables));
  }
  const std::size_t dim = std::size_t{1} << n;
  std::vector<std::uint64_t> image(dim);
  for (std::uint64_t b = 0; b < dim; ++b) {
    image[b] = greedy_repair(rm, SpinConfig::from_index(b, n)).to_index();
  }
  return image;
}

Distribution transform_distribution(const Distribution& d, const RepairModel& rm, std::optional<std::size_t> top_k) {
  if (d.n != rm.n()) {
    throw std::invalid_argument("dimension mismatch between distribution and repair model");
  }
  Distribution out{d.n, {}, d.shots};
  if (top_k && d.shots) {
    if (*top_k == 0) {
      throw std::invalid_argument("top_k must be positive");
    }
    // Rebuild individual shots, repair, keep the k best by objective value.
    std::vector<std::tuple<double, std::uint64_t>> repaired;
    repaired.reserve(*d.shots);
    for (const auto& [b, p] : d.mass) {
      const auto count = static_cast<std::size_t>(std::llround(p * static_cast<double>(*d.shots)));
      const auto image = greedy_repair(rm, SpinConfig::from_index(b, d.n));
      const double c = eval_qubo(rm.objective(), image);
      for (std::size_t k = 0; k < count; ++k) {
        repaired.emplace_back(c, image.to_index());
      }
    }
    std::sort(repaired.begin(), repaired.end());
    const std::size_t keep = std::min(*top_k, repaired.size());
    for (std::size_t k = 0; k < keep; ++k) {
      out.mass[std::get<1>(repaired[k])] += 1.0 / static_cast<double>(keep);
    }
    out.shots = keep;
    return out;
  }
  for (const auto& [b, p] : d.mass) {
    out.mass[greedy_repair(rm, SpinConfig::from_index(b, d.n)).to_index()] += p;
  }
  return out;
}

void to_json(nlohmann::json& j, const RepairTrace& trace) {
  j = nlohmann::json{{"input", trace.input.to_string()},
                     {"output", trace.output.to_string()},
                     {"flips", trace.flips},
                     {"energies", trace.energies}};
}

}  // namespace pvqa
