#include "pvqa/problems.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "pvqa/random.hpp"

namespace pvqa {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

std::string cond(int number, const std::string& detail) {
  return "condition " + std::to_string(number) + " violated: " + detail;
}

bool within(std::int64_t value, const InequalityConstraint& ineq) {
  return ineq.b_min <= value && value <= ineq.b_max;
}

}  // namespace

// --- instances --------------------------------------------------------------

std::vector<std::size_t> GppInstance::degrees() const {
  std::vector<std::size_t> k(n_nodes, 0);
  for (const auto& [i, j] : edges) {
    ++k[i];
    ++k[j];
  }
  return k;
}

std::int64_t QkpInstance::profit(std::size_t i, std::size_t j) const {
  auto it = profits.find(i <= j ? VariablePair{i, j} : VariablePair{j, i});
  return it == profits.end() ? 0 : it->second;
}

GppInstance gen_gpp(std::size_t n_nodes, double density, std::uint64_t seed) {
  if (n_nodes % 2 != 0) {
    throw std::invalid_argument("nodes must be even (got " + std::to_string(n_nodes) + ")");
  }
  if (n_nodes < 4) {
    throw std::invalid_argument("nodes must be at least 4");
  }
  if (!(density > 0.0 && density <= 1.0)) {
    throw std::invalid_argument("edge density must lie in (0, 1]");
  }
  GppInstance g{n_nodes, {}, seed, density};
  Rng rng(seed);
  for (std::size_t i = 0; i < n_nodes; ++i) {
    for (std::size_t j = i + 1; j < n_nodes; ++j) {
      if (uniform01(rng) < density) {
        g.edges.emplace(i, j);
      }
    }
  }
  return g;
}

QuboPair gpp_qubo(const GppInstance& g, double penalty) {
  const std::size_t n = g.n_nodes;
  Qubo objective(n);
  for (const auto& [i, j] : g.edges) {
    objective.add_quadratic(i, j, -2.0);
  }
  const auto k = g.degrees();
  for (std::size_t i = 0; i < n; ++i) {
    if (k[i] != 0) {
      objective.add_linear(i, static_cast<double>(k[i]));
    }
  }
  // (sum x - n/2)^2 with x_i^2 = x_i.
  const double half = static_cast<double>(n) / 2.0;
  Qubo constraint(n, half * half);
  for (std::size_t i = 0; i < n; ++i) {
    constraint.add_linear(i, 1.0 - 2.0 * half);
    for (std::size_t j = i + 1; j < n; ++j) {
      constraint.add_quadratic(i, j, 2.0);
    }
  }
  return QuboPair(std::move(objective), std::move(constraint), penalty);
}

QkpInstance derive_qkp(const QkpInstance& base, std::size_t n) {
  if (base.n_items != 100) {
    throw std::invalid_argument("base instance must have exactly 100 items");
  }
  if (n > 100) {
    throw std::invalid_argument("cannot derive more than 100 items");
  }
  if (n < 2) {
    throw std::invalid_argument("derived instance needs at least 2 items");
  }
  QkpInstance q;
  q.n_items = n;
  for (const auto& [key, p] : base.profits) {
    if (key.second < n) {
      q.profits.emplace(key, p);
    }
  }
  q.weights.assign(base.weights.begin(), base.weights.begin() + static_cast<std::ptrdiff_t>(n));
  q.capacity = static_cast<std::int64_t>(n) * base.capacity / 100;
  return q;
}

QuboPair qkp_qubo(const QkpInstance& q, double penalty) {
  const std::size_t n = q.n_items;
  Qubo objective(n);
  for (const auto& [key, p] : q.profits) {
    if (key.first == key.second) {
      objective.add_linear(key.first, -static_cast<double>(p));
    } else {
      objective.add_quadratic(key.first, key.second, -static_cast<double>(p));
    }
  }
  const double c2 = static_cast<double>(q.capacity) * static_cast<double>(q.capacity);
  Qubo constraint(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto wi = static_cast<double>(q.weights[i]);
    constraint.add_linear(i, wi * wi / c2);
    for (std::size_t j = i + 1; j < n; ++j) {
      constraint.add_quadratic(i, j, 2.0 * wi * static_cast<double>(q.weights[j]) / c2);
    }
  }
  return QuboPair(std::move(objective), std::move(constraint), penalty);
}

QkpInstance gen_qkp_base(std::size_t n_items, double density, std::uint64_t seed) {
  Rng rng(seed);
  QkpInstance q;
  q.n_items = n_items;
  for (std::size_t i = 0; i < n_items; ++i) {
    for (std::size_t j = i; j < n_items; ++j) {
      if (uniform01(rng) < density) {
        q.profits.emplace(VariablePair{i, j}, uniform_int(rng, 1, 100));
      }
    }
  }
  std::int64_t total = 0;
  for (std::size_t i = 0; i < n_items; ++i) {
    q.weights.push_back(uniform_int(rng, 1, 50));
    total += q.weights.back();
  }
  q.capacity = uniform_int(rng, std::min<std::int64_t>(50, total), total);
  return q;
}

QuboPair build_qubo(const ProblemInstance& instance, double penalty) {
  return std::visit(overloaded{[&](const GppInstance& g) { return gpp_qubo(g, penalty); },
                               [&](const QkpInstance& q) { return qkp_qubo(q, penalty); }},
                    instance);
}

// --- constraints ------------------------------------------------------------

void ConstraintSpec::check_conditions() const {
  std::visit(overloaded{
                 [&](const KHotConstraint& c) {
                   if (c.k > c.subset.size()) {
                     throw std::domain_error("k-hot condition violated: k = " + std::to_string(c.k) +
                                             " exceeds |V'| = " + std::to_string(c.subset.size()));
                   }
                   for (auto i : c.subset) {
                     if (i >= n) {
                       throw std::domain_error("k-hot subset index out of range");
                     }
                   }
                 },
                 [&](const InequalityConstraint& c) {
                   if (c.coefficients.size() != n) {
                     throw std::domain_error("inequality has " + std::to_string(c.coefficients.size()) +
                                             " coefficients for " + std::to_string(n) + " variables");
                   }
                   std::int64_t max_abs = 0;
                   std::int64_t lowest = 0;
                   std::int64_t highest = 0;
                   for (auto a : c.coefficients) {
                     max_abs = std::max(max_abs, a < 0 ? -a : a);
                     (a < 0 ? lowest : highest) += a;
                   }
                   if (c.b_max - c.b_min < max_abs - 1) {
                     throw std::domain_error(cond(2, "b_max - b_min = " + std::to_string(c.b_max - c.b_min) +
                                                         " < max|a_i| - 1 = " + std::to_string(max_abs - 1)));
                   }
                   // With condition 2, walking from the lowest to the highest
                   // reachable sum one flip at a time cannot skip the window.
                   if (c.b_max < lowest || c.b_min > highest) {
                     throw std::domain_error(cond(3, "no feasible solution exists"));
                   }
                 }},
             kind);
}

std::int64_t ConstraintSpec::weighted_sum(const SpinConfig& x) const {
  if (x.size() != n) {
    throw std::invalid_argument("dimension mismatch between constraint and configuration");
  }
  return std::visit(overloaded{[&](const KHotConstraint& c) {
                                 std::int64_t s = 0;
                                 for (auto i : c.subset) {
                                   s += x.bit(i);
                                 }
                                 return s;
                               },
                               [&](const InequalityConstraint& c) {
                                 std::int64_t s = 0;
                                 for (std::size_t i = 0; i < n; ++i) {
                                   if (x.bit(i)) {
                                     s += c.coefficients[i];
                                   }
                                 }
                                 return s;
                               }},
                    kind);
}

std::int64_t ConstraintSpec::weighted_sum_index(std::uint64_t index) const {
  return std::visit(overloaded{[&](const KHotConstraint& c) {
                                 std::int64_t s = 0;
                                 for (auto i : c.subset) {
                                   s += static_cast<std::int64_t>((index >> i) & 1U);
                                 }
                                 return s;
                               },
                               [&](const InequalityConstraint& c) {
                                 std::int64_t s = 0;
                                 for (std::size_t i = 0; i < n; ++i) {
                                   if ((index >> i) & 1U) {
                                     s += c.coefficients[i];
                                   }
                                 }
                                 return s;
                               }},
                    kind);
}

ConstraintSpec constraint_of(const GppInstance& g) {
  KHotConstraint khot{g.n_nodes / 2, {}};
  for (std::size_t i = 0; i < g.n_nodes; ++i) {
    khot.subset.push_back(i);
  }
  ConstraintSpec c{g.n_nodes, std::move(khot)};
  c.check_conditions();
  return c;
}

ConstraintSpec constraint_of(const QkpInstance& q) {
  ConstraintSpec c{q.n_items, InequalityConstraint{q.weights, 0, q.capacity}};
  c.check_conditions();
  return c;
}

ConstraintSpec constraint_of(const ProblemInstance& instance) {
  return std::visit([](const auto& inst) { return constraint_of(inst); }, instance);
}

bool is_feasible(const ConstraintSpec& c, const SpinConfig& x) {
  const auto s = c.weighted_sum(x);
  return std::visit(overloaded{[&](const KHotConstraint& k) { return s == static_cast<std::int64_t>(k.k); },
                               [&](const InequalityConstraint& ineq) { return within(s, ineq); }},
                    c.kind);
}

bool is_feasible_index(const ConstraintSpec& c, std::uint64_t index) {
  const auto s = c.weighted_sum_index(index);
  return std::visit(overloaded{[&](const KHotConstraint& k) { return s == static_cast<std::int64_t>(k.k); },
                               [&](const InequalityConstraint& ineq) { return within(s, ineq); }},
                    c.kind);
}

// --- exhaustive oracle ------------------------------------------------------

Optima brute_force_optima(const ConstraintSpec& c, const QuboPair& pair) {
  const std::size_t n = pair.n();
  if (n > kMaxDenseVariables) {
    throw std::invalid_argument("brute force limited to n <= " + std::to_string(kMaxDenseVariables) + " (got " +
                                std::to_string(n) + ")");
  }
  if (c.n != n) {
    throw std::invalid_argument("dimension mismatch between constraint and QUBO");
  }
  const auto energies = qubo_energy_table(pair.objective());
  double best = 0.0;
  std::vector<std::uint64_t> argmin;
  for (std::uint64_t b = 0; b < energies.size(); ++b) {
    if (!is_feasible_index(c, b)) {
      continue;
    }
    const double e = energies[b];
    const double tol = 1e-9 * std::max(1.0, std::abs(e));
    if (argmin.empty() || e < best - tol) {
      best = e;
      argmin.assign(1, b);
    } else if (std::abs(e - best) <= tol) {
      argmin.push_back(b);
    }
  }
  if (argmin.empty()) {
    throw std::domain_error("empty feasible set");
  }
  Optima out;
  out.c_opt = best;
  for (auto b : argmin) {
    out.optimal_set.push_back(SpinConfig::from_index(b, n));
  }
  return out;
}

Optima brute_force_optima(const ProblemInstance& instance, const QuboPair& pair) {
  return brute_force_optima(constraint_of(instance), pair);
}

// --- benchmark text format --------------------------------------------------

namespace {

struct LineReader {
  std::vector<std::string> lines;
  std::size_t pos = 0;

  explicit LineReader(std::string_view text) {
    std::string line;
    std::istringstream in{std::string(text)};
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') {
        line.pop_back();
      }
      lines.push_back(line);
    }
  }

  static bool blank(const std::string& s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
  }

  // Next non-blank line; returns its 1-based number.
  std::size_t next(const std::string& what) {
    while (pos < lines.size() && blank(lines[pos])) {
      ++pos;
    }
    if (pos >= lines.size()) {
      throw std::invalid_argument("unexpected end of input while reading " + what + " (line " +
                                  std::to_string(lines.size() + 1) + ")");
    }
    return ++pos;
  }

  std::vector<std::int64_t> numbers(const std::string& what, std::size_t expected) {
    const std::size_t line_no = next(what);
    std::istringstream in(lines[line_no - 1]);
    std::vector<std::int64_t> values;
    std::string token;
    while (in >> token) {
      std::size_t used = 0;
      std::int64_t v = 0;
      try {
        v = std::stoll(token, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != token.size()) {
        throw std::invalid_argument("line " + std::to_string(line_no) + ": " + what + " has non-integer token '" +
                                    token + "'");
      }
      values.push_back(v);
    }
    if (values.size() != expected) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": " + what + " expected " +
                                  std::to_string(expected) + " values, got " + std::to_string(values.size()));
    }
    return values;
  }
};

bool is_integer_line(const std::string& s) {
  std::istringstream in(s);
  std::string token;
  if (!(in >> token)) {
    return false;
  }
  return std::all_of(token.begin(), token.end(), [](unsigned char c) { return std::isdigit(c) || c == '-'; });
}

}  // namespace

QkpInstance parse_qkp_benchmark(std::string_view text) {
  LineReader reader(text);
  // Optional instance name.
  while (reader.pos < reader.lines.size() && LineReader::blank(reader.lines[reader.pos])) {
    ++reader.pos;
  }
  if (reader.pos < reader.lines.size() && !is_integer_line(reader.lines[reader.pos])) {
    ++reader.pos;
  }
  const auto n_values = reader.numbers("item count", 1);
  if (n_values[0] < 1) {
    throw std::invalid_argument("line " + std::to_string(reader.pos) + ": item count must be positive");
  }
  QkpInstance q;
  q.n_items = static_cast<std::size_t>(n_values[0]);
  const std::size_t n = q.n_items;

  const auto diag = reader.numbers("item profits row", n);
  for (std::size_t i = 0; i < n; ++i) {
    if (diag[i] != 0) {
      q.profits.emplace(VariablePair{i, i}, diag[i]);
    }
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const auto row = reader.numbers("pair profits row " + std::to_string(i + 1), n - 1 - i);
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (row[k] != 0) {
        q.profits.emplace(VariablePair{i, i + 1 + k}, row[k]);
      }
    }
  }
  reader.numbers("constraint type", 1);
  q.capacity = reader.numbers("capacity", 1)[0];
  q.weights = reader.numbers("weights row", n);

  for (const auto& [key, p] : q.profits) {
    if (p < 0) {
      throw std::invalid_argument("negative profit for pair (" + std::to_string(key.first) + ", " +
                                  std::to_string(key.second) + ")");
    }
  }
  for (auto w : q.weights) {
    if (w < 1) {
      throw std::invalid_argument("weights must be positive integers");
    }
  }
  if (q.capacity < 1) {
    throw std::invalid_argument("capacity must be a positive integer");
  }
  return q;
}

std::string format_qkp_benchmark(const QkpInstance& q, std::string_view name) {
  std::ostringstream out;
  const std::size_t n = q.n_items;
  out << name << '\n' << n << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    out << q.profit(i, i) << (i + 1 < n ? " " : "\n");
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      out << q.profit(i, j) << (j + 1 < n ? " " : "\n");
    }
  }
  out << "\n0\n" << q.capacity << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    out << q.weights[i] << (i + 1 < n ? " " : "\n");
  }
  return out.str();
}

// --- ensembles --------------------------------------------------------------

std::vector<GppInstance> gpp_ensemble(std::size_t count, std::size_t n_nodes, double density,
                                      std::uint64_t first_seed) {
  std::vector<GppInstance> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    out.push_back(gen_gpp(n_nodes, density, first_seed + k));
  }
  return out;
}

std::vector<std::pair<std::uint64_t, QkpInstance>> qkp_ensemble(std::size_t count, std::size_t n_items,
                                                                std::uint64_t first_seed) {
  std::vector<std::pair<std::uint64_t, QkpInstance>> out;
  for (std::uint64_t seed = first_seed; out.size() < count; ++seed) {
    auto derived = derive_qkp(gen_qkp_base(100, 1.0, seed), n_items);
    try {
      constraint_of(derived);
    } catch (const std::domain_error&) {
      continue;
    }
    out.emplace_back(seed, std::move(derived));
  }
  return out;
}

std::size_t problem_size(const ProblemInstance& instance) {
  return std::visit(overloaded{[](const GppInstance& g) { return g.n_nodes; },
                               [](const QkpInstance& q) { return q.n_items; }},
                    instance);
}

// --- JSON -------------------------------------------------------------------

void to_json(nlohmann::json& j, const GppInstance& g) {
  auto edges = nlohmann::json::array();
  for (const auto& [a, b] : g.edges) {
    edges.push_back({a, b});
  }
  j = nlohmann::json{{"kind", "gpp"}, {"n_nodes", g.n_nodes}, {"density", g.density}, {"seed", g.seed},
                     {"edges", std::move(edges)}};
}

void from_json(const nlohmann::json& j, GppInstance& g) {
  g = GppInstance{};
  g.n_nodes = j.at("n_nodes").get<std::size_t>();
  g.density = j.value("density", 0.0);
  g.seed = j.value("seed", std::uint64_t{0});
  if (g.n_nodes % 2 != 0) {
    throw std::invalid_argument("nodes must be even");
  }
  for (const auto& e : j.at("edges")) {
    auto a = e.at(0).get<std::size_t>();
    auto b = e.at(1).get<std::size_t>();
    if (a == b || a >= g.n_nodes || b >= g.n_nodes) {
      throw std::invalid_argument("invalid edge (" + std::to_string(a) + ", " + std::to_string(b) + ")");
    }
    if (!g.edges.emplace(std::min(a, b), std::max(a, b)).second) {
      throw std::invalid_argument("duplicate edge (" + std::to_string(a) + ", " + std::to_string(b) + ")");
    }
  }
}

void to_json(nlohmann::json& j, const QkpInstance& q) {
  auto profits = nlohmann::json::array();
  for (const auto& [key, p] : q.profits) {
    profits.push_back({key.first, key.second, p});
  }
  j = nlohmann::json{{"kind", "qkp"},           {"n_items", q.n_items},   {"capacity", q.capacity},
                     {"weights", q.weights},    {"profits", std::move(profits)}};
}

void from_json(const nlohmann::json& j, QkpInstance& q) {
  q = QkpInstance{};
  q.n_items = j.at("n_items").get<std::size_t>();
  q.capacity = j.at("capacity").get<std::int64_t>();
  q.weights = j.at("weights").get<std::vector<std::int64_t>>();
  if (q.weights.size() != q.n_items) {
    throw std::invalid_argument("weights length does not match n_items");
  }
  for (const auto& t : j.at("profits")) {
    auto a = t.at(0).get<std::size_t>();
    auto b = t.at(1).get<std::size_t>();
    if (a > b || b >= q.n_items) {
      throw std::invalid_argument("profit keys must satisfy i <= j < n_items");
    }
    q.profits[{a, b}] = t.at(2).get<std::int64_t>();
  }
}

void to_json(nlohmann::json& j, const ProblemInstance& instance) {
  std::visit([&](const auto& inst) { to_json(j, inst); }, instance);
}

ProblemInstance instance_from_json(const nlohmann::json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "gpp") {
    return j.get<GppInstance>();
  }
  if (kind == "qkp") {
    return j.get<QkpInstance>();
  }
  throw std::invalid_argument("unknown instance kind '" + kind + "'");
}

void to_json(nlohmann::json& j, const ConstraintSpec& c) {
  std::visit(overloaded{[&](const KHotConstraint& k) {
                          j = nlohmann::json{{"kind", "k_hot"}, {"n", c.n}, {"k", k.k}, {"subset", k.subset}};
                        },
                        [&](const InequalityConstraint& ineq) {
                          j = nlohmann::json{{"kind", "inequality"},
                                             {"n", c.n},
                                             {"coefficients", ineq.coefficients},
                                             {"b_min", ineq.b_min},
                                             {"b_max", ineq.b_max}};
                        }},
             c.kind);
}

}  // namespace pvqa
