#include "pvqa/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace pvqa {

namespace {

VariablePair ordered(std::size_t i, std::size_t j) { return i < j ? VariablePair{i, j} : VariablePair{j, i}; }

template <typename Map, typename Key>
void accumulate(Map& map, const Key& key, double value) {
  auto [it, inserted] = map.try_emplace(key, value);
  if (!inserted) {
    it->second += value;
  }
  if (it->second == 0.0) {
    map.erase(it);
  }
}

void check_index(std::size_t i, std::size_t n, const char* what) {
  if (i >= n) {
    throw std::out_of_range(std::string(what) + " index " + std::to_string(i) + " out of range for n = " +
                            std::to_string(n));
  }
}

void check_size(std::size_t expected, const SpinConfig& x) {
  if (x.size() != expected) {
    throw std::invalid_argument("dimension mismatch: model has " + std::to_string(expected) +
                                " variables, configuration has " + std::to_string(x.size()));
  }
}

std::vector<double> dense_symmetric(std::size_t n, const std::map<VariablePair, double>& pairs) {
  std::vector<double> dense(n * n, 0.0);
  for (const auto& [key, value] : pairs) {
    dense[key.first * n + key.second] = value;
    dense[key.second * n + key.first] = value;
  }
  return dense;
}

void check_dense_size(std::size_t n) {
  if (n > kMaxDenseVariables) {
    throw std::invalid_argument("energy table requested for n = " + std::to_string(n) + " > " +
                                std::to_string(kMaxDenseVariables));
  }
}

}  // namespace

// --- SpinConfig -------------------------------------------------------------

SpinConfig::SpinConfig(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto& b : bits_) {
    if (b > 1) {
      throw std::invalid_argument("spin configuration entries must be 0 or 1");
    }
  }
}

SpinConfig::SpinConfig(std::initializer_list<int> bits) {
  bits_.reserve(bits.size());
  for (int b : bits) {
    if (b != 0 && b != 1) {
      throw std::invalid_argument("spin configuration entries must be 0 or 1");
    }
    bits_.push_back(static_cast<std::uint8_t>(b));
  }
}

SpinConfig SpinConfig::from_index(std::uint64_t index, std::size_t n) {
  if (n > 64) {
    throw std::invalid_argument("index form supports at most 64 variables");
  }
  SpinConfig x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x.bits_[i] = static_cast<std::uint8_t>((index >> i) & 1U);
  }
  return x;
}

std::size_t SpinConfig::popcount() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::uint64_t SpinConfig::to_index() const {
  if (bits_.size() > 64) {
    throw std::invalid_argument("index form supports at most 64 variables");
  }
  std::uint64_t index = 0;
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    index |= static_cast<std::uint64_t>(bits_[i]) << i;
  }
  return index;
}

std::string SpinConfig::to_string() const {
  std::string s;
  s.reserve(bits_.size());
  for (auto b : bits_) {
    s.push_back(b ? '1' : '0');
  }
  return s;
}

// --- Qubo -------------------------------------------------------------------

void Qubo::add_linear(std::size_t i, double value) {
  check_index(i, n_, "linear");
  accumulate(linear_, i, value);
}

void Qubo::add_quadratic(std::size_t i, std::size_t j, double value) {
  check_index(i, n_, "quadratic");
  check_index(j, n_, "quadratic");
  if (i == j) {
    throw std::invalid_argument("quadratic term needs two distinct variables");
  }
  accumulate(quadratic_, ordered(i, j), value);
}

double Qubo::linear_at(std::size_t i) const {
  auto it = linear_.find(i);
  return it == linear_.end() ? 0.0 : it->second;
}

double Qubo::quadratic_at(std::size_t i, std::size_t j) const {
  auto it = quadratic_.find(ordered(i, j));
  return it == quadratic_.end() ? 0.0 : it->second;
}

Qubo& Qubo::operator+=(const Qubo& other) {
  if (other.n_ != n_) {
    throw std::invalid_argument("cannot add QUBOs of different sizes");
  }
  for (const auto& [i, v] : other.linear_) {
    accumulate(linear_, i, v);
  }
  for (const auto& [key, v] : other.quadratic_) {
    accumulate(quadratic_, key, v);
  }
  offset_ += other.offset_;
  return *this;
}

Qubo Qubo::scaled(double factor) const {
  Qubo out(n_, offset_ * factor);
  for (const auto& [i, v] : linear_) {
    out.add_linear(i, v * factor);
  }
  for (const auto& [key, v] : quadratic_) {
    out.add_quadratic(key.first, key.second, v * factor);
  }
  return out;
}

Qubo operator+(Qubo lhs, const Qubo& rhs) {
  lhs += rhs;
  return lhs;
}

// --- QuboPair ---------------------------------------------------------------

QuboPair::QuboPair(Qubo objective, Qubo constraint, double penalty_coefficient)
    : objective_(std::move(objective)), constraint_(std::move(constraint)), penalty_(penalty_coefficient) {
  if (objective_.n() != constraint_.n()) {
    throw std::invalid_argument("objective and constraint QUBOs differ in size");
  }
  if (!(penalty_ > 0.0)) {
    throw std::invalid_argument("penalty coefficient must be positive");
  }
}

Qubo QuboPair::combined() const { return objective_ + constraint_.scaled(penalty_); }

// --- IsingModel -------------------------------------------------------------

void IsingModel::add_field(std::size_t i, double value) {
  check_index(i, n_, "field");
  accumulate(fields_, i, value);
}

void IsingModel::add_coupling(std::size_t i, std::size_t j, double value) {
  check_index(i, n_, "coupling");
  check_index(j, n_, "coupling");
  if (i == j) {
    throw std::invalid_argument("coupling needs two distinct spins");
  }
  accumulate(couplings_, ordered(i, j), value);
}

double IsingModel::field_at(std::size_t i) const {
  auto it = fields_.find(i);
  return it == fields_.end() ? 0.0 : it->second;
}

double IsingModel::coupling_at(std::size_t i, std::size_t j) const {
  auto it = couplings_.find(ordered(i, j));
  return it == couplings_.end() ? 0.0 : it->second;
}

double IsingModel::max_abs_coefficient() const {
  double m = 0.0;
  for (const auto& [i, v] : fields_) {
    m = std::max(m, std::abs(v));
  }
  for (const auto& [key, v] : couplings_) {
    m = std::max(m, std::abs(v));
  }
  return m;
}

// --- transforms and evaluation ---------------------------------------------

IsingModel qubo_to_ising(const Qubo& q) {
  IsingModel m(q.n(), q.offset());
  for (const auto& [i, v] : q.linear()) {
    m.add_field(i, v / 2.0);
    m.add_offset(v / 2.0);
  }
  for (const auto& [key, v] : q.quadratic()) {
    const double quarter = v / 4.0;
    m.add_coupling(key.first, key.second, quarter);
    m.add_field(key.first, quarter);
    m.add_field(key.second, quarter);
    m.add_offset(quarter);
  }
  return m;
}

RescaledIsing rescale_ising(const IsingModel& m) {
  const double scale = m.max_abs_coefficient();
  if (scale == 0.0) {
    throw std::invalid_argument("degenerate model: all couplings and fields are zero");
  }
  IsingModel out(m.n(), m.offset() / scale);
  for (const auto& [i, v] : m.fields()) {
    out.add_field(i, v / scale);
  }
  for (const auto& [key, v] : m.couplings()) {
    out.add_coupling(key.first, key.second, v / scale);
  }
  return {std::move(out), scale};
}

double eval_qubo(const Qubo& q, const SpinConfig& x) {
  check_size(q.n(), x);
  double e = q.offset();
  for (const auto& [i, v] : q.linear()) {
    if (x.bit(i)) {
      e += v;
    }
  }
  for (const auto& [key, v] : q.quadratic()) {
    if (x.bit(key.first) && x.bit(key.second)) {
      e += v;
    }
  }
  return e;
}

double eval_ising(const IsingModel& m, const SpinConfig& sigma) {
  check_size(m.n(), sigma);
  double e = m.offset();
  for (const auto& [i, v] : m.fields()) {
    e += v * sigma.spin(i);
  }
  for (const auto& [key, v] : m.couplings()) {
    e += v * sigma.spin(key.first) * sigma.spin(key.second);
  }
  return e;
}

CostValues eval_cost(const QuboPair& pair, const SpinConfig& x) {
  const double c = eval_qubo(pair.objective(), x);
  return {c, c + pair.penalty_coefficient() * eval_qubo(pair.constraint(), x)};
}

std::vector<double> qubo_energy_table(const Qubo& q) {
  const std::size_t n = q.n();
  check_dense_size(n);
  const auto dense = dense_symmetric(n, q.quadratic());
  std::vector<double> lin(n, 0.0);
  for (const auto& [i, v] : q.linear()) {
    lin[i] = v;
  }
  const std::size_t dim = std::size_t{1} << n;
  std::vector<double> table(dim);
  table[0] = q.offset();
  // Energy of b follows from b without its highest set bit.
  for (std::size_t b = 1; b < dim; ++b) {
    const std::size_t i = std::bit_width(b) - 1;
    const std::size_t rest = b & ~(std::size_t{1} << i);
    double delta = lin[i];
    for (std::size_t r = rest; r != 0; r &= r - 1) {
      delta += dense[i * n + static_cast<std::size_t>(std::countr_zero(r))];
    }
    table[b] = table[rest] + delta;
  }
  return table;
}

std::vector<double> ising_energy_table(const IsingModel& m) {
  const std::size_t n = m.n();
  check_dense_size(n);
  const auto dense = dense_symmetric(n, m.couplings());
  std::vector<double> h(n, 0.0);
  for (const auto& [i, v] : m.fields()) {
    h[i] = v;
  }
  const std::size_t dim = std::size_t{1} << n;
  std::vector<double> table(dim);
  // All spins down.
  double e0 = m.offset();
  for (std::size_t i = 0; i < n; ++i) {
    e0 -= h[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      e0 += dense[i * n + j];
    }
  }
  table[0] = e0;
  for (std::size_t b = 1; b < dim; ++b) {
    const std::size_t i = std::bit_width(b) - 1;
    const std::size_t rest = b & ~(std::size_t{1} << i);
    // Spin i goes from -1 to +1 with every other spin as in `rest`.
    double field = h[i];
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) {
        field += dense[i * n + j] * (((rest >> j) & 1U) ? 1.0 : -1.0);
      }
    }
    table[b] = table[rest] + 2.0 * field;
  }
  return table;
}

// --- JSON -------------------------------------------------------------------

namespace {

void write_canonical(nlohmann::json& j, std::size_t n, const std::map<std::size_t, double>& linear,
                     const std::map<VariablePair, double>& quadratic, double offset) {
  auto lin = nlohmann::json::array();
  for (const auto& [i, v] : linear) {
    lin.push_back({i, v});
  }
  auto quad = nlohmann::json::array();
  for (const auto& [key, v] : quadratic) {
    quad.push_back({key.first, key.second, v});
  }
  j = nlohmann::json{{"n", n}, {"linear", std::move(lin)}, {"quadratic", std::move(quad)}, {"offset", offset}};
}

}  // namespace

void to_json(nlohmann::json& j, const Qubo& q) {
  write_canonical(j, q.n(), q.linear(), q.quadratic(), q.offset());
}

void from_json(const nlohmann::json& j, Qubo& q) {
  q = Qubo(j.at("n").get<std::size_t>(), j.value("offset", 0.0));
  for (const auto& t : j.at("linear")) {
    q.add_linear(t.at(0).get<std::size_t>(), t.at(1).get<double>());
  }
  for (const auto& t : j.at("quadratic")) {
    q.add_quadratic(t.at(0).get<std::size_t>(), t.at(1).get<std::size_t>(), t.at(2).get<double>());
  }
}

void to_json(nlohmann::json& j, const IsingModel& m) {
  write_canonical(j, m.n(), m.fields(), m.couplings(), m.offset());
}

void from_json(const nlohmann::json& j, IsingModel& m) {
  m = IsingModel(j.at("n").get<std::size_t>(), j.value("offset", 0.0));
  for (const auto& t : j.at("linear")) {
    m.add_field(t.at(0).get<std::size_t>(), t.at(1).get<double>());
  }
  for (const auto& t : j.at("quadratic")) {
    m.add_coupling(t.at(0).get<std::size_t>(), t.at(1).get<std::size_t>(), t.at(2).get<double>());
  }
}

void to_json(nlohmann::json& j, const SpinConfig& x) { j = x.to_string(); }

void from_json(const nlohmann::json& j, SpinConfig& x) {
  const auto s = j.get<std::string>();
  std::vector<std::uint8_t> bits;
  bits.reserve(s.size());
  for (char c : s) {
    if (c != '0' && c != '1') {
      throw std::invalid_argument("spin configuration string must contain only 0 and 1");
    }
    bits.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  x = SpinConfig(std::move(bits));
}

}  // namespace pvqa
