#include "pvqa/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

namespace pvqa {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

std::vector<double> params_of(const Schedule& sch) {
  return std::visit(overloaded{[](const ContinuousSchedule& c) { return c.values; },
                               [](const LinearSchedule& l) { return std::vector<double>{l.s1, l.s2}; },
                               [](const QaoaSchedule& q) { return q.breakpoints; },
                               [](const AnnealerSchedule& a) { return std::vector<double>{a.s1, a.s2}; }},
                    sch);
}

std::string fmt_number(double v) {
  std::ostringstream out;
  out.precision(10);
  out << v;
  return out.str();
}

void write_optional(std::ostream& out, std::optional<double> v) {
  if (v && std::isfinite(*v)) {
    out << fmt_number(*v);
  }
}

// Objective evaluation and final measurement for one (spec, instance, penalty).
class Evaluator {
 public:
  Evaluator(const VariantSpec& spec, const ProblemContext& ctx, double penalty)
      : spec_(spec), ctx_(ctx), pair_(ctx.pair(penalty)) {
    const auto scaled = rescale_ising(qubo_to_ising(pair_.combined()));
    ising_energies_ = ising_energy_table(scaled.model);
    full_energies_ = qubo_energy_table(pair_.combined());
    const auto& image = ctx.repair_image();
    const auto& c = ctx.objective_table();
    repaired_cost_.resize(c.size());
    for (std::size_t b = 0; b < c.size(); ++b) {
      repaired_cost_[b] = c[image[b]];
    }
    if (spec.family.kind != FamilyKind::Qaoa) {
      rk4_.emplace(ising_energies_, ctx.n(), spec.dt.value_or(default_dt(spec.horizon)));
    }
  }

  const QuboPair& pair() const { return pair_; }

  std::vector<double> dense_probabilities(std::span<const double> params) {
    const auto sch = clamp_project(spec_.family.make(params, spec_.horizon));
    if (const auto* q = std::get_if<QaoaSchedule>(&sch)) {
      return probabilities(evolve_qaoa_exact(ising_energies_, ctx_.n(), *q));
    }
    return probabilities(rk4_->evolve(sch));
  }

  double objective(std::span<const double> params) {
    const auto probs = dense_probabilities(params);
    const bool repair = uses_repair(spec_.variant);
    if (!spec_.shots) {
      const auto& table = repair ? repaired_cost_ : full_energies_;
      double e = 0.0;
      for (std::size_t b = 0; b < probs.size(); ++b) {
        e += probs[b] * table[b];
      }
      return e;
    }
    const auto sampled = sample_shots(dense_to_distribution(ctx_.n(), probs), spec_.shots->count,
                                      spec_.shots->seed + ++shot_draws_);
    double e = 0.0;
    if (repair) {
      const auto d = transform_distribution(sampled, ctx_.repair(), spec_.shots->top_k);
      for (const auto& [b, p] : d.mass) {
        e += p * ctx_.objective_table()[b];
      }
    } else {
      for (const auto& [b, p] : sampled.mass) {
        e += p * full_energies_[b];
      }
    }
    return e;
  }

  // Raw and analysed distributions at the final parameters.
  std::pair<Distribution, Distribution> measure(std::span<const double> params) {
    const auto probs = dense_probabilities(params);
    Distribution raw = dense_to_distribution(ctx_.n(), probs);
    std::optional<std::size_t> top_k;
    if (spec_.shots) {
      // Final draw uses a seed no objective evaluation can reach.
      raw = sample_shots(raw, spec_.shots->count, spec_.shots->seed ^ 0xF1A1F1A1F1A1F1A1ULL);
      top_k = spec_.shots->top_k;
    }
    if (!uses_repair(spec_.variant)) {
      return {raw, raw};
    }
    Distribution post = transform_distribution(raw, ctx_.repair(), top_k);
    return {std::move(raw), std::move(post)};
  }

 private:
  const VariantSpec& spec_;
  const ProblemContext& ctx_;
  QuboPair pair_;
  std::vector<double> ising_energies_;
  std::vector<double> full_energies_;
  std::vector<double> repaired_cost_;
  std::optional<CachedRk4> rk4_;
  std::uint64_t shot_draws_ = 0;
};

}  // namespace

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::PVqa:
      return "pVQA";
    case Variant::Vqa:
      return "VQA";
    case Variant::PQa:
      return "pQA";
    case Variant::Qa:
      return "QA";
  }
  return "?";
}

Variant parse_variant(std::string_view name) {
  for (auto v : {Variant::PVqa, Variant::Vqa, Variant::PQa, Variant::Qa}) {
    if (name == variant_name(v)) {
      return v;
    }
  }
  throw std::invalid_argument("unknown variant '" + std::string(name) + "' (expected pVQA, VQA, pQA or QA)");
}

bool uses_repair(Variant v) { return v == Variant::PVqa || v == Variant::PQa; }
bool is_variational(Variant v) { return v == Variant::PVqa || v == Variant::Vqa; }

ScheduleFamily ScheduleFamily::continuous(std::size_t m) { return {FamilyKind::Continuous, m}; }
ScheduleFamily ScheduleFamily::linear() { return {FamilyKind::Linear, 0}; }
ScheduleFamily ScheduleFamily::qaoa(std::size_t p) { return {FamilyKind::Qaoa, p}; }
ScheduleFamily ScheduleFamily::annealer() { return {FamilyKind::Annealer, 0}; }

ScheduleFamily ScheduleFamily::parse(std::string_view name, std::size_t size) {
  if (name == "continuous") {
    return continuous(size);
  }
  if (name == "linear") {
    return linear();
  }
  if (name == "qaoa") {
    return qaoa(size);
  }
  if (name == "annealer") {
    return annealer();
  }
  throw std::invalid_argument("unknown schedule family '" + std::string(name) +
                              "' (expected continuous, linear, qaoa or annealer)");
}

std::size_t ScheduleFamily::parameter_count() const {
  switch (kind) {
    case FamilyKind::Continuous:
      return size;
    case FamilyKind::Qaoa:
      return 2 * size;
    case FamilyKind::Linear:
    case FamilyKind::Annealer:
      return 2;
  }
  return 0;
}

Schedule ScheduleFamily::make(std::span<const double> params, double horizon) const {
  if (params.size() != parameter_count()) {
    throw std::invalid_argument(name() + " schedule expects " + std::to_string(parameter_count()) +
                                " parameters, got " + std::to_string(params.size()));
  }
  std::vector<double> p(params.begin(), params.end());
  switch (kind) {
    case FamilyKind::Continuous:
      return ContinuousSchedule{std::move(p), horizon};
    case FamilyKind::Linear:
      return LinearSchedule{p[0], p[1], horizon};
    case FamilyKind::Qaoa:
      return QaoaSchedule{std::move(p), horizon};
    case FamilyKind::Annealer:
      return AnnealerSchedule{p[0], p[1], horizon};
  }
  throw std::logic_error("unhandled schedule family");
}

std::vector<double> ScheduleFamily::initial(double) const {
  if (kind == FamilyKind::Qaoa) {
    return std::vector<double>(parameter_count(), 0.0);
  }
  return std::vector<double>(parameter_count(), 0.5);
}

std::vector<double> ScheduleFamily::lower(double) const { return std::vector<double>(parameter_count(), 0.0); }

std::vector<double> ScheduleFamily::upper(double horizon) const {
  return std::vector<double>(parameter_count(), kind == FamilyKind::Qaoa ? horizon : 1.0);
}

std::string ScheduleFamily::name() const {
  switch (kind) {
    case FamilyKind::Continuous:
      return "continuous";
    case FamilyKind::Linear:
      return "linear";
    case FamilyKind::Qaoa:
      return "qaoa";
    case FamilyKind::Annealer:
      return "annealer";
  }
  return "?";
}

std::string_view optimizer_name(OptimizerKind k) {
  switch (k) {
    case OptimizerKind::Powell:
      return "powell";
    case OptimizerKind::GridSearch:
      return "grid";
    case OptimizerKind::GradientDescent:
      return "gradient";
    case OptimizerKind::None:
      return "none";
  }
  return "?";
}

OptimizerKind parse_optimizer(std::string_view name) {
  for (auto k : {OptimizerKind::Powell, OptimizerKind::GridSearch, OptimizerKind::GradientDescent,
                 OptimizerKind::None}) {
    if (name == optimizer_name(k)) {
      return k;
    }
  }
  throw std::invalid_argument("unknown optimizer '" + std::string(name) + "' (expected powell, grid, gradient or none)");
}

VariantSpec VariantSpec::make(Variant v, ScheduleFamily family, double horizon) {
  VariantSpec s;
  s.variant = v;
  s.horizon = horizon;
  if (!is_variational(v)) {
    s.family = ScheduleFamily::linear();
    s.optimizer = OptimizerKind::None;
    s.fixed_params = {0.0, 1.0};
    return s;
  }
  s.family = family;
  switch (family.kind) {
    case FamilyKind::Continuous:
      s.optimizer = OptimizerKind::GradientDescent;
      s.max_iter = 50;
      break;
    case FamilyKind::Qaoa:
      s.optimizer = OptimizerKind::Powell;
      s.max_iter = 10 * family.size;
      break;
    case FamilyKind::Linear:
    case FamilyKind::Annealer:
      s.optimizer = OptimizerKind::Powell;
      s.max_iter = 10;
      break;
  }
  return s;
}

void VariantSpec::validate() const {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("annealing time T must be positive");
  }
  if (family.parameter_count() == 0) {
    throw std::invalid_argument(family.name() + " schedule needs a positive size");
  }
  if (family.kind == FamilyKind::Continuous && family.size < 2) {
    throw std::invalid_argument("continuous schedule needs M >= 2");
  }
  if (!is_variational(variant)) {
    if (optimizer != OptimizerKind::None || family.kind != FamilyKind::Linear || fixed_params != std::vector{0.0, 1.0}) {
      throw std::invalid_argument(std::string(variant_name(variant)) +
                                  " runs the fixed linear path from s = 0 to s = 1 without an optimizer");
    }
  }
  if (optimizer == OptimizerKind::None && fixed_params.size() != family.parameter_count()) {
    throw std::invalid_argument("fixed parameters must have " + std::to_string(family.parameter_count()) + " entries");
  }
  if (optimizer == OptimizerKind::GradientDescent && family.kind != FamilyKind::Continuous) {
    throw std::invalid_argument("gradient descent applies to the continuous schedule family only");
  }
  if (optimizer == OptimizerKind::GridSearch && family.parameter_count() > 3) {
    throw std::invalid_argument("grid search supports at most 3 parameters");
  }
  if (optimizer != OptimizerKind::None && max_iter == 0 && optimizer != OptimizerKind::GridSearch) {
    throw std::invalid_argument("max_iter must be at least 1");
  }
  if (dt && !(*dt > 0.0)) {
    throw std::invalid_argument("dt must be positive");
  }
  if (shots && shots->count == 0) {
    throw std::invalid_argument("shot count must be positive");
  }
}

ProblemContext::ProblemContext(ProblemInstance instance, std::string id)
    : instance_(std::move(instance)),
      id_(std::move(id)),
      n_(problem_size(instance_)),
      constraint_(constraint_of(instance_)),
      repair_(make_repair_model(build_qubo(instance_, 1.0).objective(), constraint_)),
      optima_(brute_force_optima(constraint_, build_qubo(instance_, 1.0))) {
  if (n_ > kMaxDenseVariables) {
    throw std::invalid_argument("instance too large for dense simulation: n = " + std::to_string(n_));
  }
  objective_ = qubo_energy_table(repair_.objective());
  image_ = repair_table(repair_);
  const std::size_t dim = objective_.size();
  feasible_.assign(dim, 0);
  optimal_.assign(dim, 0);
  for (std::uint64_t b = 0; b < dim; ++b) {
    feasible_[b] = is_feasible_index(constraint_, b) ? 1 : 0;
  }
  for (const auto& x : optima_.optimal_set) {
    optimal_[x.to_index()] = 1;
  }
}

Metrics metrics(const Distribution& d, const QuboPair& pair, const std::function<bool(const SpinConfig&)>& feasible,
                const std::vector<SpinConfig>& optimal_set, bool post_processed) {
  if (optimal_set.empty()) {
    throw std::invalid_argument("optimum set must be nonempty");
  }
  std::vector<std::uint64_t> optimal;
  for (const auto& x : optimal_set) {
    optimal.push_back(x.to_index());
  }
  std::sort(optimal.begin(), optimal.end());

  Metrics m;
  double feasible_mass = 0.0;
  double weighted = 0.0;
  for (const auto& [b, p] : d.mass) {
    const auto x = SpinConfig::from_index(b, d.n);
    if (std::binary_search(optimal.begin(), optimal.end(), b)) {
      m.p_suc += p;
    }
    if (post_processed) {
      weighted += eval_qubo(pair.objective(), x) * p;
    } else if (feasible(x)) {
      feasible_mass += p;
      weighted += eval_qubo(pair.objective(), x) * p;
    }
  }
  if (post_processed) {
    m.p_fs = 1.0;
    m.c_ave = weighted;
  } else {
    m.p_fs = feasible_mass;
    if (feasible_mass > 0.0) {
      m.c_ave = weighted / feasible_mass;
    }
  }
  return m;
}

double residual_energy(double c_ave, double c_opt) { return c_ave - c_opt; }

double variant_objective(const VariantSpec& spec, const ProblemContext& ctx, double penalty,
                         std::span<const double> params) {
  spec.validate();
  Evaluator ev(spec, ctx, penalty);
  return ev.objective(params);
}

ExperimentReport run_variant(const VariantSpec& spec, const ProblemContext& ctx, double penalty) {
  spec.validate();
  const auto start = std::chrono::steady_clock::now();
  Evaluator ev(spec, ctx, penalty);
  const double T = spec.horizon;

  ObjectiveFn f([&ev](std::span<const double> x) { return ev.objective(x); }, spec.family.lower(T),
                spec.family.upper(T), [family = spec.family, T](std::span<const double> x) {
                  return params_of(clamp_project(family.make(x, T)));
                });

  OptimizeResult opt;
  switch (spec.optimizer) {
    case OptimizerKind::Powell:
      opt = powell_minimize(f, spec.family.initial(T), spec.max_iter);
      break;
    case OptimizerKind::GridSearch:
      opt = grid_search(f, spec.grid_resolution);
      break;
    case OptimizerKind::GradientDescent:
      opt = continuous_gradient_descent(f, spec.max_iter);
      break;
    case OptimizerKind::None:
      opt.best_params = f.project(spec.fixed_params);
      opt.best_value = f(opt.best_params);
      opt.evaluations = 1;
      break;
  }

  ExperimentReport r;
  r.instance_id = ctx.id();
  r.variant = spec.variant;
  r.family = spec.family.name();
  r.optimizer = std::string(optimizer_name(spec.optimizer));
  r.horizon = T;
  r.params = opt.best_params;
  r.schedule = clamp_project(spec.family.make(opt.best_params, T));
  r.penalty = penalty;
  r.evaluations = opt.evaluations;
  r.iterations = opt.iterations;

  auto [raw, post] = ev.measure(opt.best_params);
  const auto& constraint = ctx.constraint();
  const auto feasible = [&constraint](const SpinConfig& x) { return is_feasible(constraint, x); };
  const auto m = metrics(post, ev.pair(), feasible, ctx.optima().optimal_set, uses_repair(spec.variant));
  r.p_fs = m.p_fs;
  r.c_ave = m.c_ave;
  r.p_suc = m.p_suc;
  if (m.c_ave) {
    r.residual = residual_energy(*m.c_ave, ctx.optima().c_opt);
  }
  for (const auto& [b, p] : raw.mass) {
    if (ctx.feasible(b)) {
      r.raw_p_fs += p;
    }
  }
  r.raw = std::move(raw);
  r.final = std::move(post);
  r.optimization = std::move(opt);
  r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<double> PenaltyGrid::values() const {
  if (!(step > 0.0) || !(min > 0.0) || !(max >= min)) {
    throw std::invalid_argument("penalty grid needs 0 < min <= max and step > 0");
  }
  std::vector<double> out;
  for (std::size_t k = 0;; ++k) {
    const double v = min + static_cast<double>(k) * step;
    if (v > max + 1e-9 * step) {
      break;
    }
    out.push_back(v);
  }
  return out;
}

PenaltyGrid PenaltyGrid::defaults_for(const ProblemInstance& instance) {
  if (std::holds_alternative<QkpInstance>(instance)) {
    return {200.0, 200.0, 4000.0};
  }
  return {1.0, 1.0, 10.0};
}

TuneResult tune_penalty(const VariantSpec& spec, const ProblemContext& ctx, const PenaltyGrid& grid) {
  const auto values = grid.values();
  TuneResult out;
  std::optional<std::size_t> best;
  std::vector<ExperimentReport> reports;
  for (double a : values) {
    auto r = run_variant(spec, ctx, a);
    PenaltyCandidate c{a, r.raw_p_fs, r.c_ave, r.raw_p_fs >= kFeasibleRateThreshold && r.c_ave.has_value()};
    if (c.admissible && (!best || *c.c_ave < *out.candidates[*best].c_ave)) {
      best = out.candidates.size();
    }
    out.candidates.push_back(c);
    reports.push_back(std::move(r));
  }
  if (!best) {
    throw std::runtime_error("no admissible penalty: no grid value reaches a feasible rate of 0.1 on " + ctx.id());
  }
  out.penalty = out.candidates[*best].penalty;
  out.report = std::move(reports[*best]);
  return out;
}

Stat summarize(std::span<const double> values) {
  Stat s;
  s.count = values.size();
  if (values.empty()) {
    s.mean = std::numeric_limits<double>::quiet_NaN();
    s.stddev = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  double sum = 0.0;
  for (double v : values) {
    sum += v;
  }
  s.mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) {
    sq += (v - s.mean) * (v - s.mean);
  }
  s.stddev = std::sqrt(sq / static_cast<double>(values.size()));
  return s;
}

SummaryRow summarize(const VariantSpec& spec, std::span<const ExperimentReport> reports) {
  SummaryRow row;
  row.variant = std::string(variant_name(spec.variant));
  row.horizon = spec.horizon;
  row.schedule = spec.family.name();
  row.instances = reports.size();
  std::vector<double> a, fs, c, suc, res;
  for (const auto& r : reports) {
    a.push_back(r.penalty);
    fs.push_back(r.p_fs);
    suc.push_back(r.p_suc);
    if (r.c_ave) {
      c.push_back(*r.c_ave);
    }
    if (r.residual) {
      res.push_back(*r.residual);
    }
  }
  row.penalty = summarize(a);
  row.p_fs = summarize(fs);
  row.c_ave = summarize(c);
  row.p_suc = summarize(suc);
  row.residual = summarize(res);
  return row;
}

EnsembleResult ensemble_run(const std::vector<VariantSpec>& specs, const std::vector<ProblemContext>& instances,
                            const PenaltyPolicy& policy, std::size_t jobs) {
  if (instances.empty()) {
    throw std::invalid_argument("ensemble needs at least one instance");
  }
  for (const auto& s : specs) {
    s.validate();
  }
  const std::size_t tasks = specs.size() * instances.size();
  std::vector<std::optional<ExperimentReport>> results(tasks);
  std::vector<std::exception_ptr> errors(tasks);
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    for (std::size_t t = next++; t < tasks; t = next++) {
      const auto& spec = specs[t / instances.size()];
      const auto& ctx = instances[t % instances.size()];
      try {
        if (policy.fixed) {
          results[t] = run_variant(spec, ctx, *policy.fixed);
          continue;
        }
        const auto grid = policy.grid.value_or(PenaltyGrid::defaults_for(ctx.instance()));
        if (policy.tune_with) {
          VariantSpec tuner = *policy.tune_with;
          tuner.horizon = spec.horizon;
          const double a = tune_penalty(tuner, ctx, grid).penalty;
          results[t] = run_variant(spec, ctx, a);
        } else {
          results[t] = tune_penalty(spec, ctx, grid).report;
        }
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  };

  const std::size_t threads = std::max<std::size_t>(1, std::min(jobs, tasks));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < threads; ++i) {
      pool.emplace_back(worker);
    }
    for (auto& th : pool) {
      th.join();
    }
  }
  for (const auto& e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }

  EnsembleResult out;
  out.reports.resize(specs.size());
  for (std::size_t t = 0; t < tasks; ++t) {
    out.reports[t / instances.size()].push_back(std::move(*results[t]));
  }
  for (std::size_t i = 0; i < specs.size(); ++i) {
    out.rows.push_back(summarize(specs[i], out.reports[i]));
  }
  return out;
}

void to_json(nlohmann::json& j, const ExperimentReport& r) {
  auto opt = [](std::optional<double> v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  j = nlohmann::json{{"instance", r.instance_id},
                     {"variant", variant_name(r.variant)},
                     {"family", r.family},
                     {"optimizer", r.optimizer},
                     {"T", r.horizon},
                     {"params", r.params},
                     {"schedule", r.schedule},
                     {"A", r.penalty},
                     {"p_fs", r.p_fs},
                     {"c_ave", opt(r.c_ave)},
                     {"p_suc", r.p_suc},
                     {"residual", opt(r.residual)},
                     {"raw_p_fs", r.raw_p_fs},
                     {"evaluations", r.evaluations},
                     {"iterations", r.iterations},
                     {"wall_time_s", r.wall_time_s}};
}

void to_json(nlohmann::json& j, const VariantSpec& s) {
  j = nlohmann::json{{"variant", variant_name(s.variant)},
                     {"family", s.family.name()},
                     {"size", s.family.size},
                     {"T", s.horizon},
                     {"optimizer", optimizer_name(s.optimizer)},
                     {"max_iter", s.max_iter},
                     {"grid_resolution", s.grid_resolution},
                     {"fixed_params", s.fixed_params},
                     {"trace", s.trace}};
  if (s.dt) {
    j["dt"] = *s.dt;
  }
  if (s.shots) {
    nlohmann::json shots{{"count", s.shots->count}, {"seed", s.shots->seed}};
    if (s.shots->top_k) {
      shots["top_k"] = *s.shots->top_k;
    }
    j["shots"] = shots;
  }
}

VariantSpec variant_spec_from_json(const nlohmann::json& j) {
  const auto variant = parse_variant(j.at("variant").get<std::string>());
  const auto family = ScheduleFamily::parse(j.value("family", std::string("linear")), j.value("size", std::size_t{0}));
  auto s = VariantSpec::make(variant, family, j.value("T", 1.0));
  if (j.contains("optimizer")) {
    s.optimizer = parse_optimizer(j.at("optimizer").get<std::string>());
  }
  s.max_iter = j.value("max_iter", s.max_iter);
  s.grid_resolution = j.value("grid_resolution", s.grid_resolution);
  s.fixed_params = j.value("fixed_params", s.fixed_params);
  s.trace = j.value("trace", false);
  if (j.contains("dt")) {
    s.dt = j.at("dt").get<double>();
  }
  if (j.contains("shots")) {
    const auto& sh = j.at("shots");
    ShotMode m;
    m.count = sh.value("count", m.count);
    m.seed = sh.value("seed", m.seed);
    if (sh.contains("top_k")) {
      m.top_k = sh.at("top_k").get<std::size_t>();
    }
    s.shots = m;
  }
  return s;
}

const char* const kReportCsvHeader =
    "instance,variant,schedule,T,A,p_fs,c_ave,p_suc,residual,raw_p_fs,evaluations,iterations,params,wall_time_s";
const char* const kSummaryCsvHeader =
    "variant,T,schedule,A,p_fs,c_ave,p_suc,residual,p_fs_std,c_ave_std,p_suc_std,residual_std,instances";

void write_report_csv_row(std::ostream& out, const ExperimentReport& r) {
  out << r.instance_id << ',' << variant_name(r.variant) << ',' << r.family << ',' << fmt_number(r.horizon) << ','
      << fmt_number(r.penalty) << ',' << fmt_number(r.p_fs) << ',';
  write_optional(out, r.c_ave);
  out << ',' << fmt_number(r.p_suc) << ',';
  write_optional(out, r.residual);
  out << ',' << fmt_number(r.raw_p_fs) << ',' << r.evaluations << ',' << r.iterations << ',';
  for (std::size_t i = 0; i < r.params.size(); ++i) {
    out << (i ? ";" : "") << fmt_number(r.params[i]);
  }
  out << ',' << fmt_number(r.wall_time_s) << '\n';
}

void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows) {
  out << kSummaryCsvHeader << '\n';
  auto mean = [](const Stat& s) { return s.count ? std::optional<double>(s.mean) : std::nullopt; };
  auto sd = [](const Stat& s) { return s.count ? std::optional<double>(s.stddev) : std::nullopt; };
  for (const auto& r : rows) {
    out << r.variant << ',' << fmt_number(r.horizon) << ',' << r.schedule << ',';
    write_optional(out, mean(r.penalty));
    for (const Stat* s : {&r.p_fs, &r.c_ave, &r.p_suc, &r.residual}) {
      out << ',';
      write_optional(out, mean(*s));
    }
    for (const Stat* s : {&r.p_fs, &r.c_ave, &r.p_suc, &r.residual}) {
      out << ',';
      write_optional(out, sd(*s));
    }
    out << ',' << r.instances << '\n';
  }
}

}  // namespace pvqa
