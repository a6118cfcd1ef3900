#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace pvqa {

using VariablePair = std::pair<std::size_t, std::size_t>;

// Largest register the dense (2^n) code paths accept.
inline constexpr std::size_t kMaxDenseVariables = 24;

/// Assignment of n binary variables. The spin view is sigma_i = 2 * x_i - 1.
class SpinConfig {
 public:
  SpinConfig() = default;
  explicit SpinConfig(std::size_t n) : bits_(n, 0) {}
  explicit SpinConfig(std::vector<std::uint8_t> bits);
  SpinConfig(std::initializer_list<int> bits);

  /// Bit i of `index` becomes variable i.
  static SpinConfig from_index(std::uint64_t index, std::size_t n);

  std::size_t size() const { return bits_.size(); }
  int bit(std::size_t i) const { return bits_[i]; }
  int spin(std::size_t i) const { return 2 * bits_[i] - 1; }
  void set(std::size_t i, int value) { bits_[i] = value ? 1 : 0; }
  void flip(std::size_t i) { bits_[i] ^= 1; }
  std::size_t popcount() const;

  std::uint64_t to_index() const;
  /// Variable 0 first, e.g. "1100".
  std::string to_string() const;
  const std::vector<std::uint8_t>& bits() const { return bits_; }

  friend bool operator==(const SpinConfig&, const SpinConfig&) = default;
  friend auto operator<=>(const SpinConfig&, const SpinConfig&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

/// Quadratic pseudo-boolean function
///   Q(x) = sum_{i<j} q_ij x_i x_j + sum_i q_ii x_i + Q_0.
/// Coefficients that cancel to exactly zero are dropped.
class Qubo {
 public:
  Qubo() = default;
  explicit Qubo(std::size_t n, double offset = 0.0) : n_(n), offset_(offset) {}

  void add_linear(std::size_t i, double value);
  /// Pairs are stored unordered (i < j). Throws on i == j.
  void add_quadratic(std::size_t i, std::size_t j, double value);
  void add_offset(double value) { offset_ += value; }

  std::size_t n() const { return n_; }
  const std::map<std::size_t, double>& linear() const { return linear_; }
  const std::map<VariablePair, double>& quadratic() const { return quadratic_; }
  double offset() const { return offset_; }

  double linear_at(std::size_t i) const;
  double quadratic_at(std::size_t i, std::size_t j) const;

  Qubo& operator+=(const Qubo& other);
  Qubo scaled(double factor) const;

  friend bool operator==(const Qubo&, const Qubo&) = default;

 private:
  std::size_t n_ = 0;
  std::map<std::size_t, double> linear_;
  std::map<VariablePair, double> quadratic_;
  double offset_ = 0.0;
};

Qubo operator+(Qubo lhs, const Qubo& rhs);

/// Objective and (unweighted) constraint QUBOs with the penalty weight A.
class QuboPair {
 public:
  QuboPair(Qubo objective, Qubo constraint, double penalty_coefficient);

  const Qubo& objective() const { return objective_; }
  const Qubo& constraint() const { return constraint_; }
  double penalty_coefficient() const { return penalty_; }
  std::size_t n() const { return objective_.n(); }

  /// Q_obj + A * Q_cst.
  Qubo combined() const;

 private:
  Qubo objective_;
  Qubo constraint_;
  double penalty_;
};

/// H = sum J_ij s_i s_j + sum h_i s_i + H_0 over s_i in {-1, +1}.
class IsingModel {
 public:
  IsingModel() = default;
  explicit IsingModel(std::size_t n, double offset = 0.0) : n_(n), offset_(offset) {}

  void add_field(std::size_t i, double value);
  void add_coupling(std::size_t i, std::size_t j, double value);
  void add_offset(double value) { offset_ += value; }

  std::size_t n() const { return n_; }
  const std::map<std::size_t, double>& fields() const { return fields_; }
  const std::map<VariablePair, double>& couplings() const { return couplings_; }
  double offset() const { return offset_; }

  double field_at(std::size_t i) const;
  double coupling_at(std::size_t i, std::size_t j) const;

  /// Largest |J_ij| or |h_i|.
  double max_abs_coefficient() const;

  friend bool operator==(const IsingModel&, const IsingModel&) = default;

 private:
  std::size_t n_ = 0;
  std::map<std::size_t, double> fields_;
  std::map<VariablePair, double> couplings_;
  double offset_ = 0.0;
};

struct RescaledIsing {
  IsingModel model;
  double scale = 1.0;  // divisor applied to J, h and H_0
};

struct CostValues {
  double c = 0.0;       // objective only
  double c_full = 0.0;  // objective plus weighted constraint
};

/// Substitutes x_i = (sigma_i + 1) / 2; energies agree config by config.
IsingModel qubo_to_ising(const Qubo& q);

/// Divides all coefficients by max(|J|, |h|). Throws on an all-zero model.
RescaledIsing rescale_ising(const IsingModel& m);

double eval_qubo(const Qubo& q, const SpinConfig& x);
double eval_ising(const IsingModel& m, const SpinConfig& sigma);
CostValues eval_cost(const QuboPair& pair, const SpinConfig& x);

/// Energy of every configuration, indexed bitwise (n <= kMaxDenseVariables).
std::vector<double> qubo_energy_table(const Qubo& q);
std::vector<double> ising_energy_table(const IsingModel& m);

void to_json(nlohmann::json& j, const Qubo& q);
void from_json(const nlohmann::json& j, Qubo& q);
void to_json(nlohmann::json& j, const IsingModel& m);
void from_json(const nlohmann::json& j, IsingModel& m);
void to_json(nlohmann::json& j, const SpinConfig& x);
void from_json(const nlohmann::json& j, SpinConfig& x);

}  // namespace pvqa
