#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pvqa/dynamics.hpp"
#include "pvqa/model.hpp"
#include "pvqa/optimize.hpp"
#include "pvqa/postprocess.hpp"
#include "pvqa/problems.hpp"
#include "pvqa/schedule.hpp"

namespace pvqa {

/// pVQA / VQA optimise the path; pQA / QA run the fixed linear path.
/// The leading p marks repair of every measured configuration.
enum class Variant { PVqa, Vqa, PQa, Qa };

std::string_view variant_name(Variant v);
Variant parse_variant(std::string_view name);
bool uses_repair(Variant v);
bool is_variational(Variant v);

enum class FamilyKind { Continuous, Linear, Qaoa, Annealer };

/// Parameterisation of an annealing path. `size` is M for the continuous family
/// and the layer count p for QAOA; other families ignore it.
struct ScheduleFamily {
  FamilyKind kind = FamilyKind::Linear;
  std::size_t size = 0;

  static ScheduleFamily continuous(std::size_t m);
  static ScheduleFamily linear();
  static ScheduleFamily qaoa(std::size_t p);
  static ScheduleFamily annealer();
  static ScheduleFamily parse(std::string_view name, std::size_t size);

  std::size_t parameter_count() const;
  Schedule make(std::span<const double> params, double horizon) const;
  std::vector<double> initial(double horizon) const;
  std::vector<double> lower(double horizon) const;
  std::vector<double> upper(double horizon) const;
  std::string name() const;
};

enum class OptimizerKind { Powell, GridSearch, GradientDescent, None };

std::string_view optimizer_name(OptimizerKind k);
OptimizerKind parse_optimizer(std::string_view name);

/// Empirical measurement: `count` shots per evaluation, seeds derived from `seed`.
struct ShotMode {
  std::size_t count = 1000;
  std::optional<std::size_t> top_k;
  std::uint64_t seed = 0;
};

struct VariantSpec {
  Variant variant = Variant::PVqa;
  ScheduleFamily family;
  double horizon = 1.0;
  OptimizerKind optimizer = OptimizerKind::Powell;
  std::size_t max_iter = 10;
  double grid_resolution = 0.1;
  std::optional<ShotMode> shots;
  std::optional<double> dt;
  std::vector<double> fixed_params;  // used when optimizer is None
  bool trace = false;

  /// Defaults: pQA/QA run Linear{0, 1} without an optimizer; variational runs use
  /// Powell (10 iterations, 10p for QAOA) or gradient descent for the continuous family.
  static VariantSpec make(Variant v, ScheduleFamily family, double horizon);
  void validate() const;
};

/// Per-instance data independent of the penalty coefficient.
class ProblemContext {
 public:
  ProblemContext(ProblemInstance instance, std::string id);

  const ProblemInstance& instance() const { return instance_; }
  const std::string& id() const { return id_; }
  std::size_t n() const { return n_; }
  const ConstraintSpec& constraint() const { return constraint_; }
  const RepairModel& repair() const { return repair_; }
  const Optima& optima() const { return optima_; }
  QuboPair pair(double penalty) const { return build_qubo(instance_, penalty); }

  /// C(b) for every configuration index.
  const std::vector<double>& objective_table() const { return objective_; }
  /// P(b) for every configuration index.
  const std::vector<std::uint64_t>& repair_image() const { return image_; }
  bool feasible(std::uint64_t b) const { return feasible_[b] != 0; }
  bool optimal(std::uint64_t b) const { return optimal_[b] != 0; }

 private:
  ProblemInstance instance_;
  std::string id_;
  std::size_t n_;
  ConstraintSpec constraint_;
  RepairModel repair_;
  Optima optima_;
  std::vector<double> objective_;
  std::vector<std::uint64_t> image_;
  std::vector<std::uint8_t> feasible_;
  std::vector<std::uint8_t> optimal_;
};

struct Metrics {
  double p_fs = 0.0;
  std::optional<double> c_ave;  // absent for raw distributions without feasible mass
  double p_suc = 0.0;
};

/// Repaired distributions: p_fs = 1, c_ave = sum C p, p_suc = sum_S p.
/// Raw distributions: p_fs = sum_F p, c_ave = sum_F C p / p_fs, p_suc = sum_S p.
Metrics metrics(const Distribution& d, const QuboPair& pair, const std::function<bool(const SpinConfig&)>& feasible,
                const std::vector<SpinConfig>& optimal_set, bool post_processed);

/// c_ave - c_opt.
double residual_energy(double c_ave, double c_opt);

struct ExperimentReport {
  std::string instance_id;
  Variant variant = Variant::PVqa;
  std::string family;
  std::string optimizer;
  double horizon = 0.0;
  std::vector<double> params;
  Schedule schedule;
  double penalty = 0.0;
  double p_fs = 0.0;
  std::optional<double> c_ave;
  double p_suc = 0.0;
  std::optional<double> residual;
  double raw_p_fs = 0.0;  // feasible mass before repair
  std::size_t evaluations = 0;
  std::size_t iterations = 0;
  double wall_time_s = 0.0;
  Distribution raw;    // measured distribution at the final parameters
  Distribution final;  // distribution the metrics are computed on
  OptimizeResult optimization;
};

/// Optimise (if variational), then measure once at the final parameters.
ExperimentReport run_variant(const VariantSpec& spec, const ProblemContext& ctx, double penalty);

/// Expected cost at fixed parameters: E over repaired outcomes for p-variants,
/// E' over raw outcomes otherwise. Exposed for tests and tooling.
double variant_objective(const VariantSpec& spec, const ProblemContext& ctx, double penalty,
                         std::span<const double> params);

struct PenaltyGrid {
  double min = 1.0;
  double step = 1.0;
  double max = 10.0;

  std::vector<double> values() const;
  static PenaltyGrid defaults_for(const ProblemInstance& instance);
};

struct PenaltyCandidate {
  double penalty = 0.0;
  double raw_p_fs = 0.0;
  std::optional<double> c_ave;
  bool admissible = false;
};

struct TuneResult {
  double penalty = 0.0;
  ExperimentReport report;
  std::vector<PenaltyCandidate> candidates;
};

/// Among grid values whose raw feasible rate reaches 0.1, the one with the lowest
/// c_ave; ties go to the smallest value. Throws "no admissible penalty" otherwise.
TuneResult tune_penalty(const VariantSpec& spec, const ProblemContext& ctx, const PenaltyGrid& grid);

constexpr double kFeasibleRateThreshold = 0.1;

/// Either a fixed coefficient or per-instance tuning on a grid.
struct PenaltyPolicy {
  std::optional<double> fixed;
  std::optional<PenaltyGrid> grid;  // defaults per instance kind when unset
  /// Tune with this spec (e.g. pQA) instead of the evaluated one.
  std::optional<VariantSpec> tune_with;
};

struct Stat {
  double mean = 0.0;
  double stddev = 0.0;  // population
  std::size_t count = 0;
};

Stat summarize(std::span<const double> values);

struct SummaryRow {
  std::string variant;
  double horizon = 0.0;
  std::string schedule;
  Stat penalty;
  Stat p_fs;
  Stat c_ave;
  Stat p_suc;
  Stat residual;
  std::size_t instances = 0;
};

SummaryRow summarize(const VariantSpec& spec, std::span<const ExperimentReport> reports);

struct EnsembleResult {
  std::vector<SummaryRow> rows;                        // one per spec, in spec order
  std::vector<std::vector<ExperimentReport>> reports;  // [spec][instance]
};

/// Runs every spec on every instance; `jobs` worker threads, deterministic output order.
EnsembleResult ensemble_run(const std::vector<VariantSpec>& specs, const std::vector<ProblemContext>& instances,
                            const PenaltyPolicy& policy, std::size_t jobs = 1);

void to_json(nlohmann::json& j, const ExperimentReport& r);
void to_json(nlohmann::json& j, const VariantSpec& s);
VariantSpec variant_spec_from_json(const nlohmann::json& j);

/// Column order is fixed; see the header constants.
extern const char* const kReportCsvHeader;
extern const char* const kSummaryCsvHeader;
void write_report_csv_row(std::ostream& out, const ExperimentReport& r);
void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows);

}  // namespace pvqa
