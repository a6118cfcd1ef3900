#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pvqa/model.hpp"

namespace pvqa {

/// Balanced graph partitioning input. Node degrees are derived from `edges`.
struct GppInstance {
  std::size_t n_nodes = 0;
  std::set<VariablePair> edges;  // i < j
  std::uint64_t seed = 0;
  double density = 0.0;

  std::vector<std::size_t> degrees() const;
  friend bool operator==(const GppInstance&, const GppInstance&) = default;
};

/// Quadratic knapsack input. `profits` holds p_ij for i <= j; p_ii is the item profit.
struct QkpInstance {
  std::size_t n_items = 0;
  std::map<VariablePair, std::int64_t> profits;
  std::vector<std::int64_t> weights;
  std::int64_t capacity = 0;

  std::int64_t profit(std::size_t i, std::size_t j) const;
  friend bool operator==(const QkpInstance&, const QkpInstance&) = default;
};

using ProblemInstance = std::variant<GppInstance, QkpInstance>;

/// sum_{i in subset} x_i == k
struct KHotConstraint {
  std::size_t k = 0;
  std::vector<std::size_t> subset;
  friend bool operator==(const KHotConstraint&, const KHotConstraint&) = default;
};

/// b_min <= sum_i a_i x_i <= b_max, integer data.
struct InequalityConstraint {
  std::vector<std::int64_t> coefficients;
  std::int64_t b_min = 0;
  std::int64_t b_max = 0;
  friend bool operator==(const InequalityConstraint&, const InequalityConstraint&) = default;
};

struct ConstraintSpec {
  std::size_t n = 0;
  std::variant<KHotConstraint, InequalityConstraint> kind;

  /// Throws std::domain_error naming the first violated side condition.
  void check_conditions() const;
  /// Signed violation: sum over the subset minus k, or the weighted sum.
  std::int64_t weighted_sum(const SpinConfig& x) const;
  std::int64_t weighted_sum_index(std::uint64_t index) const;
};

struct Optima {
  std::vector<SpinConfig> optimal_set;  // sorted by index
  double c_opt = 0.0;
};

/// Independent Bernoulli edges with probability `density`. n_nodes must be even and >= 4.
GppInstance gen_gpp(std::size_t n_nodes, double density, std::uint64_t seed);

/// Q_obj = -2 sum_E x_i x_j + sum_i k_i x_i;  Q_cst = (sum_i x_i - |V|/2)^2.
QuboPair gpp_qubo(const GppInstance& g, double penalty);

/// First n items of a 100-item base; capacity floor(n * C / 100).
QkpInstance derive_qkp(const QkpInstance& base, std::size_t n);

/// Q_obj = -sum_{i<=j} p_ij x_i x_j;  Q_cst = (sum_i w_i x_i / C)^2.
QuboPair qkp_qubo(const QkpInstance& q, double penalty);

/// Random base instance in the usual QKP benchmark style: profits in [1,100] present
/// with probability `density`, weights in [1,50], capacity in [50, sum w].
QkpInstance gen_qkp_base(std::size_t n_items, double density, std::uint64_t seed);

QuboPair build_qubo(const ProblemInstance& instance, double penalty);
ConstraintSpec constraint_of(const GppInstance& g);
ConstraintSpec constraint_of(const QkpInstance& q);
ConstraintSpec constraint_of(const ProblemInstance& instance);

bool is_feasible(const ConstraintSpec& c, const SpinConfig& x);
bool is_feasible_index(const ConstraintSpec& c, std::uint64_t index);

/// Exhaustive minimum of the objective over the feasible set, keeping all ties.
Optima brute_force_optima(const ConstraintSpec& c, const QuboPair& pair);
Optima brute_force_optima(const ProblemInstance& instance, const QuboPair& pair);

/// Reads the textual QKP library layout: optional name line, n, the n item profits,
/// n-1 rows of the strict upper triangle, a constraint-type line (0), C, then n weights.
QkpInstance parse_qkp_benchmark(std::string_view text);
std::string format_qkp_benchmark(const QkpInstance& q, std::string_view name = "qkp");

/// `count` instances from consecutive seeds starting at `first_seed`.
std::vector<GppInstance> gpp_ensemble(std::size_t count, std::size_t n_nodes, double density,
                                      std::uint64_t first_seed);
/// Derived n-item QKPs from consecutive base seeds; bases whose derived instance
/// breaks a repair side condition are skipped. Returns (base seed, instance) pairs.
std::vector<std::pair<std::uint64_t, QkpInstance>> qkp_ensemble(std::size_t count, std::size_t n_items,
                                                                std::uint64_t first_seed);

std::size_t problem_size(const ProblemInstance& instance);

void to_json(nlohmann::json& j, const GppInstance& g);
void from_json(const nlohmann::json& j, GppInstance& g);
void to_json(nlohmann::json& j, const QkpInstance& q);
void from_json(const nlohmann::json& j, QkpInstance& q);
void to_json(nlohmann::json& j, const ProblemInstance& instance);
ProblemInstance instance_from_json(const nlohmann::json& j);
void to_json(nlohmann::json& j, const ConstraintSpec& c);

}  // namespace pvqa
