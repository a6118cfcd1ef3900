#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pvqa/dynamics.hpp"
#include "pvqa/model.hpp"
#include "pvqa/problems.hpp"

namespace pvqa {

/// Piecewise-linear repair Hamiltonian Q' = Q_obj + A' * Q'_cst.
///
/// Construction enforces the conditions under which every local minimum of Q'
/// under single flips is feasible: A' strictly above the single-flip bound of
/// Q_obj, and the constraint side conditions.
class RepairModel {
 public:
  RepairModel(Qubo objective, ConstraintSpec constraint, double a_prime);

  const Qubo& objective() const { return objective_; }
  const ConstraintSpec& constraint() const { return constraint_; }
  double a_prime() const { return a_prime_; }
  std::size_t n() const { return objective_.n(); }

  /// Q'(x).
  double energy(const SpinConfig& x) const;

  // Flattened form used by the descent loop.
  struct Neighbor {
    std::size_t index;
    double weight;
  };
  const std::vector<std::vector<Neighbor>>& neighbors() const { return neighbors_; }
  const std::vector<double>& linear() const { return linear_; }
  const std::vector<std::int64_t>& coefficients() const { return coefficients_; }
  std::int64_t b_min() const { return b_min_; }
  std::int64_t b_max() const { return b_max_; }

 private:
  Qubo objective_;
  ConstraintSpec constraint_;
  double a_prime_;
  std::vector<std::vector<Neighbor>> neighbors_;
  std::vector<double> linear_;
  std::vector<std::int64_t> coefficients_;
  std::int64_t b_min_ = 0;
  std::int64_t b_max_ = 0;
};

/// Inequality: max{0, sum a x - b_max, b_min - sum a x}; k-hot: |sum_{V'} x - k|.
double linear_penalty(const ConstraintSpec& c, const SpinConfig& x);

/// max_i (|q_ii| + sum_j |q_ij|), an upper bound on any single-flip change of Q.
double delta_q_bound(const Qubo& q);

/// bound * (1 + 1e-6) + 1e-6, strictly above the bound.
double default_a_prime(const Qubo& q);

RepairModel make_repair_model(const Qubo& objective, const ConstraintSpec& constraint);

struct RepairTrace {
  SpinConfig input;
  SpinConfig output;
  std::vector<std::size_t> flips;
  std::vector<double> energies;  // Q' before any flip, then after each flip
};

/// Steepest single-flip descent on Q' until no flip strictly lowers it.
/// Ties go to the lowest variable index.
SpinConfig greedy_repair(const RepairModel& rm, const SpinConfig& x);
RepairTrace greedy_repair_traced(const RepairModel& rm, const SpinConfig& x);

/// Repair image of every configuration index (n <= kMaxDenseVariables).
std::vector<std::uint64_t> repair_table(const RepairModel& rm);

/// Pushes each configuration's mass onto its repair image. For empirical
/// distributions, `top_k` keeps only the k repaired shots of lowest objective
/// value and renormalises; exact distributions ignore it.
Distribution transform_distribution(const Distribution& d, const RepairModel& rm,
                                    std::optional<std::size_t> top_k = std::nullopt);

void to_json(nlohmann::json& j, const RepairTrace& trace);

}  // namespace pvqa
