#include <doctest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "pvqa/problems.hpp"

using namespace pvqa;

namespace {

GppInstance path4() {
  GppInstance g;
  g.n_nodes = 4;
  g.edges = {{0, 1}, {1, 2}, {2, 3}};
  return g;
}

QkpInstance toy_qkp() {
  QkpInstance q;
  q.n_items = 2;
  q.profits = {{{0, 0}, 3}, {{1, 1}, 5}, {{0, 1}, 2}};
  q.weights = {1, 1};
  q.capacity = 2;
  return q;
}

QkpInstance weights_only(std::vector<std::int64_t> w, std::int64_t capacity) {
  QkpInstance q;
  q.n_items = w.size();
  q.weights = std::move(w);
  q.capacity = capacity;
  for (std::size_t i = 0; i < q.n_items; ++i) {
    q.profits[{i, i}] = 1;
  }
  return q;
}

}  // namespace

TEST_CASE("gen_gpp density one gives the complete graph") {
  const auto g = gen_gpp(8, 1.0, 3);
  CHECK(g.edges.size() == 28);
  CHECK(g.degrees() == std::vector<std::size_t>(8, 7));
}

TEST_CASE("gen_gpp is deterministic per seed") {
  CHECK(gen_gpp(8, 0.5, 7) == gen_gpp(8, 0.5, 7));
  CHECK(gen_gpp(8, 0.5, 7).edges != gen_gpp(8, 0.5, 8).edges);
}

TEST_CASE("gen_gpp rejects odd or tiny graphs") {
  CHECK_THROWS_WITH_AS(gen_gpp(7, 0.5, 1), doctest::Contains("nodes must be even"), std::invalid_argument);
  CHECK_THROWS_AS(gen_gpp(2, 0.5, 1), std::invalid_argument);
  CHECK_THROWS_AS(gen_gpp(8, 0.0, 1), std::invalid_argument);
}

TEST_CASE("gen_gpp edge count follows the binomial law") {
  const double pairs = 32.0 * 31.0 / 2.0;
  const double mean_expected = 0.5 * pairs;
  const double sigma_mean = std::sqrt(pairs * 0.25 / 1000.0);
  double total = 0.0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto g = gen_gpp(32, 0.5, seed);
    for (const auto& [i, j] : g.edges) {
      REQUIRE(i < j);
    }
    total += static_cast<double>(g.edges.size());
  }
  CHECK(std::abs(total / 1000.0 - mean_expected) < 3.0 * sigma_mean);
}

TEST_CASE("gpp objective counts cut edges on the path graph") {
  const auto pair = gpp_qubo(path4(), 1.0);
  CHECK(eval_qubo(pair.objective(), SpinConfig{1, 1, 0, 0}) == 1.0);
  CHECK(eval_qubo(pair.objective(), SpinConfig{1, 0, 1, 0}) == 3.0);
  CHECK(eval_qubo(pair.constraint(), SpinConfig{1, 0, 1, 0}) == 0.0);
  const auto zero = eval_cost(pair, SpinConfig{0, 0, 0, 0});
  CHECK(zero.c == 0.0);
  CHECK(zero.c_full == 4.0);
}

TEST_CASE("gpp objective matches the cut-size oracle on balanced configurations") {
  for (const auto& g : gpp_ensemble(10, 8, 0.5, 1)) {
    const auto pair = gpp_qubo(g, 2.5);
    for (std::uint64_t b = 0; b < 256; ++b) {
      const auto x = SpinConfig::from_index(b, 8);
      const double cst = eval_qubo(pair.constraint(), x);
      const double imbalance = static_cast<double>(x.popcount()) - 4.0;
      CHECK(cst == doctest::Approx(imbalance * imbalance));
      if (oracle::balanced(x)) {
        CHECK(eval_qubo(pair.objective(), x) == oracle::cut_size(g, x));
        CHECK(eval_cost(pair, x).c_full == eval_cost(pair, x).c);
      }
    }
  }
}

TEST_CASE("hand evaluation of the gpp objective on an unbalanced configuration") {
  // 4-node graph with edges 01, 02, 23: degrees 2, 1, 2, 1. x = (1,1,0,0)
  // keeps edge 01 inside the selected part: -2 * 1 + (2 + 1) = 1.
  GppInstance g;
  g.n_nodes = 4;
  g.edges = {{0, 1}, {0, 2}, {2, 3}};
  const auto pair = gpp_qubo(g, 1.0);
  CHECK(eval_qubo(pair.objective(), SpinConfig{1, 1, 0, 0}) == 1.0);
  CHECK(eval_qubo(pair.objective(), SpinConfig{1, 1, 1, 0}) == -2.0 * 2 + 5.0);
}

TEST_CASE("derive_qkp truncates and floors the capacity") {
  const auto base = gen_qkp_base(100, 0.5, 11);
  CHECK(derive_qkp(base, 100) == base);
  auto fixed = base;
  fixed.capacity = 1000;
  CHECK(derive_qkp(fixed, 50).capacity == 500);
  CHECK(derive_qkp(fixed, 33).capacity == 330);
  fixed.capacity = 999;
  CHECK(derive_qkp(fixed, 33).capacity == 329);
  const auto small = derive_qkp(base, 8);
  CHECK(small.n_items == 8);
  CHECK(small.weights == std::vector<std::int64_t>(base.weights.begin(), base.weights.begin() + 8));
  for (const auto& [key, p] : small.profits) {
    CHECK(key.second < 8);
    CHECK(p == base.profit(key.first, key.second));
  }
  CHECK_THROWS(derive_qkp(base, 101));
  CHECK_THROWS(derive_qkp(small, 4));
}

TEST_CASE("qkp toy encoding") {
  const auto pair = qkp_qubo(toy_qkp(), 7.0);
  CHECK(eval_qubo(pair.objective(), SpinConfig{0, 0}) == 0.0);
  CHECK(eval_qubo(pair.constraint(), SpinConfig{0, 0}) == 0.0);
  CHECK(eval_qubo(pair.objective(), SpinConfig{1, 1}) == -10.0);
  CHECK(eval_qubo(pair.constraint(), SpinConfig{1, 1}) == doctest::Approx(1.0));
  CHECK(eval_cost(pair, SpinConfig{1, 1}).c_full == doctest::Approx(-3.0));
}

TEST_CASE("qkp objective matches the profit-sum oracle") {
  for (const auto& [seed, q] : qkp_ensemble(10, 8, 1)) {
    const auto pair = qkp_qubo(q, 200.0);
    for (std::uint64_t b = 0; b < 256; ++b) {
      const auto x = SpinConfig::from_index(b, 8);
      CHECK(eval_qubo(pair.objective(), x) == doctest::Approx(-static_cast<double>(oracle::knapsack_profit(q, x))));
      double w = 0.0;
      for (std::size_t i = 0; i < 8; ++i) {
        w += static_cast<double>(q.weights[i] * x.bit(i));
      }
      const double ratio = w / static_cast<double>(q.capacity);
      CHECK(eval_qubo(pair.constraint(), x) == doctest::Approx(ratio * ratio));
    }
  }
}

TEST_CASE("constraint_of builds the expected constraint kinds") {
  const auto g = gen_gpp(8, 0.5, 2);
  const auto c = constraint_of(g);
  const auto& khot = std::get<KHotConstraint>(c.kind);
  CHECK(khot.k == 4);
  CHECK(khot.subset.size() == 8);

  const auto q = weights_only({3, 5, 2}, 6);
  const auto ci = constraint_of(q);
  const auto& ineq = std::get<InequalityConstraint>(ci.kind);
  CHECK(ineq.b_min == 0);
  CHECK(ineq.b_max == 6);
  CHECK(ineq.coefficients == std::vector<std::int64_t>{3, 5, 2});

  CHECK_THROWS_WITH_AS(constraint_of(weights_only({9}, 6)), doctest::Contains("condition 2 violated"),
                       std::domain_error);
  CHECK_NOTHROW(constraint_of(weights_only({7}, 6)));
}

TEST_CASE("is_feasible examples") {
  ConstraintSpec k2{4, KHotConstraint{2, {0, 1, 2, 3}}};
  CHECK(is_feasible(k2, SpinConfig{1, 1, 0, 0}));
  CHECK_FALSE(is_feasible(k2, SpinConfig{1, 1, 1, 0}));
  const auto ci = constraint_of(weights_only({3, 5, 2}, 6));
  CHECK(is_feasible(ci, SpinConfig{1, 0, 1}));
  CHECK_FALSE(is_feasible(ci, SpinConfig{1, 1, 0}));
}

TEST_CASE("is_feasible agrees with direct evaluation on every configuration") {
  for (const auto& g : gpp_ensemble(3, 8, 0.5, 5)) {
    const auto c = constraint_of(g);
    for (std::uint64_t b = 0; b < 256; ++b) {
      const auto x = SpinConfig::from_index(b, 8);
      CHECK(is_feasible(c, x) == oracle::balanced(x));
      CHECK(is_feasible_index(c, b) == oracle::balanced(x));
    }
  }
  for (const auto& [seed, q] : qkp_ensemble(3, 8, 5)) {
    const auto c = constraint_of(q);
    for (std::uint64_t b = 0; b < 256; ++b) {
      const auto x = SpinConfig::from_index(b, 8);
      CHECK(is_feasible(c, x) == oracle::within_capacity(q, x));
    }
  }
}

TEST_CASE("brute force optima of small instances") {
  const auto p = path4();
  const auto opt = brute_force_optima(ProblemInstance{p}, gpp_qubo(p, 1.0));
  CHECK(opt.c_opt == 1.0);
  CHECK(opt.optimal_set == std::vector<SpinConfig>{SpinConfig{1, 1, 0, 0}, SpinConfig{0, 0, 1, 1}});

  const auto k4 = gen_gpp(4, 1.0, 0);
  const auto opt4 = brute_force_optima(ProblemInstance{k4}, gpp_qubo(k4, 1.0));
  CHECK(opt4.c_opt == 4.0);
  CHECK(opt4.optimal_set.size() == 6);

  const auto toy = toy_qkp();
  const auto optq = brute_force_optima(ProblemInstance{toy}, qkp_qubo(toy, 1.0));
  CHECK(optq.c_opt == -10.0);
  CHECK(optq.optimal_set == std::vector<SpinConfig>{SpinConfig{1, 1}});
}

TEST_CASE("brute force optima survive a full re-scan") {
  std::vector<ProblemInstance> instances;
  for (const auto& g : gpp_ensemble(5, 8, 0.5, 21)) {
    instances.emplace_back(g);
  }
  for (const auto& [seed, q] : qkp_ensemble(5, 8, 21)) {
    instances.emplace_back(q);
  }
  for (const auto& inst : instances) {
    const auto pair = build_qubo(inst, 1.0);
    const auto c = constraint_of(inst);
    const auto opt = brute_force_optima(inst, pair);
    REQUIRE_FALSE(opt.optimal_set.empty());
    for (const auto& x : opt.optimal_set) {
      CHECK(is_feasible(c, x));
      CHECK(eval_qubo(pair.objective(), x) == opt.c_opt);
    }
    std::size_t ties = 0;
    for (std::uint64_t b = 0; b < 256; ++b) {
      const auto x = SpinConfig::from_index(b, 8);
      if (!is_feasible(c, x)) {
        continue;
      }
      const double v = oracle::qubo_value(pair.objective(), x);
      CHECK(v >= opt.c_opt);
      ties += v == opt.c_opt ? 1 : 0;
    }
    CHECK(ties == opt.optimal_set.size());
  }
}

TEST_CASE("qkp benchmark text parsing") {
  const std::string text =
      "tiny\n"
      "3\n"
      "4 0 6\n"
      "1 2\n"
      "3\n"
      "\n"
      "0\n"
      "7\n"
      "3 5 2\n";
  const auto q = parse_qkp_benchmark(text);
  CHECK(q.n_items == 3);
  CHECK(q.profit(0, 0) == 4);
  CHECK(q.profit(1, 1) == 0);
  CHECK(q.profit(2, 2) == 6);
  CHECK(q.profit(0, 1) == 1);
  CHECK(q.profit(1, 0) == 1);
  CHECK(q.profit(0, 2) == 2);
  CHECK(q.profit(1, 2) == 3);
  CHECK(q.capacity == 7);
  CHECK(q.weights == std::vector<std::int64_t>{3, 5, 2});

  const std::string truncated = "tiny\n3\n4 0 6\n1 2\n3\n\n0\n7\n3 5\n";
  CHECK_THROWS_WITH_AS(parse_qkp_benchmark(truncated), doctest::Contains("weights row"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_qkp_benchmark(truncated), doctest::Contains("line 9"), std::invalid_argument);
  CHECK_THROWS_WITH(parse_qkp_benchmark("3\n1 2 x\n"), doctest::Contains("line 2"));
}

TEST_CASE("qkp benchmark round trip") {
  const auto base = gen_qkp_base(100, 0.5, 4);
  CHECK(parse_qkp_benchmark(format_qkp_benchmark(base)) == base);
  const auto small = derive_qkp(base, 12);
  CHECK(parse_qkp_benchmark(format_qkp_benchmark(small, "derived")) == small);
}

TEST_CASE("qkp ensemble instances satisfy the repair side conditions") {
  const auto ensemble = qkp_ensemble(10, 8, 1);
  CHECK(ensemble.size() == 10);
  for (const auto& [seed, q] : ensemble) {
    CHECK(q.n_items == 8);
    CHECK_NOTHROW(constraint_of(q).check_conditions());
  }
}

TEST_CASE("instance json round trip") {
  const ProblemInstance g = gen_gpp(8, 0.5, 9);
  CHECK(std::get<GppInstance>(instance_from_json(nlohmann::json(g))) == std::get<GppInstance>(g));
  const ProblemInstance q = derive_qkp(gen_qkp_base(100, 0.5, 9), 8);
  CHECK(std::get<QkpInstance>(instance_from_json(nlohmann::json(q))) == std::get<QkpInstance>(q));
}
