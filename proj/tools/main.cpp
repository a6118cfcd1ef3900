// Command-line front end: instance generation, single runs, ensemble sweeps,
// penalty tuning and brute-force optima.
//
// Exit codes: 0 success, 1 usage error, 2 runtime or numerical error.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pvqa/harness.hpp"
#include "run_config.hpp"

namespace fs = std::filesystem;
using namespace pvqa;
using pvqa::cli::RunConfig;

namespace {

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << text;
}

ProblemContext load_context(const std::string& path) {
  if (path.empty()) {
    throw UsageError("--instance is required");
  }
  const auto j = nlohmann::json::parse(read_file(path));
  return ProblemContext(instance_from_json(j), fs::path(path).stem().string());
}

std::vector<ProblemContext> load_directory(const std::string& dir) {
  if (dir.empty()) {
    throw UsageError("--instances is required");
  }
  if (!fs::is_directory(dir)) {
    throw std::runtime_error("instance directory " + dir + " does not exist");
  }
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") {
      files.push_back(e.path());
    }
  }
  if (files.empty()) {
    throw std::runtime_error("no instance files (*.json) in " + dir);
  }
  std::sort(files.begin(), files.end());
  std::vector<ProblemContext> out;
  for (const auto& f : files) {
    out.push_back(load_context(f.string()));
  }
  return out;
}

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(6);
  out << v;
  return out.str();
}

std::string fmt(std::optional<double> v) { return v ? fmt(*v) : std::string("NA"); }

// --- gen ----------------------------------------------------------------------

struct GenOptions {
  std::size_t nodes = 8;
  std::size_t items = 8;
  double density = 0.5;
  std::string base;
  std::optional<std::uint64_t> base_seed;
  std::size_t count = 1;
};

fs::path gen_target(const RunConfig& cfg, bool out_given, const std::string& default_name, std::size_t count) {
  if (count > 1) {
    return fs::path(out_given ? cfg.out : ".") / default_name;
  }
  return out_given ? fs::path(cfg.out) : fs::path(default_name);
}

int cmd_gen_gpp(const RunConfig& cfg, const GenOptions& g, bool out_given) {
  for (std::size_t k = 0; k < g.count; ++k) {
    const auto seed = cfg.seed + k;
    const auto inst = gen_gpp(g.nodes, g.density, seed);
    const auto name = "gpp_n" + std::to_string(g.nodes) + "_s" + std::to_string(seed) + ".json";
    const auto path = gen_target(cfg, out_given, name, g.count);
    write_file(path, nlohmann::json(ProblemInstance{inst}).dump(1) + "\n");
    std::cout << "gpp n=" << inst.n_nodes << " edges=" << inst.edges.size() << " seed=" << seed << " -> "
              << path.string() << '\n';
  }
  return 0;
}

int cmd_gen_qkp(const RunConfig& cfg, const GenOptions& g, bool out_given) {
  std::vector<std::pair<std::string, QkpInstance>> made;
  if (!g.base.empty()) {
    if (g.count != 1) {
      throw UsageError("--count applies to generated bases only, not --base");
    }
    const auto base = parse_qkp_benchmark(read_file(g.base));
    made.emplace_back("qkp_n" + std::to_string(g.items) + "_" + fs::path(g.base).stem().string() + ".json",
                      derive_qkp(base, g.items));
  } else {
    const auto first = g.base_seed.value_or(cfg.seed);
    for (const auto& [seed, q] : qkp_ensemble(g.count, g.items, first)) {
      made.emplace_back("qkp_n" + std::to_string(g.items) + "_s" + std::to_string(seed) + ".json", q);
    }
  }
  for (const auto& [name, q] : made) {
    constraint_of(q).check_conditions();
    const auto path = gen_target(cfg, out_given, name, g.count);
    write_file(path, nlohmann::json(ProblemInstance{q}).dump(1) + "\n");
    std::cout << "qkp n=" << q.n_items << " capacity=" << q.capacity << " -> " << path.string() << '\n';
  }
  return 0;
}

int cmd_gen_base(const RunConfig& cfg, const GenOptions& g, bool out_given) {
  const auto base = gen_qkp_base(g.items, g.density, cfg.seed);
  const auto name = "qkp_base_" + std::to_string(g.items) + "_s" + std::to_string(cfg.seed);
  const auto path = out_given ? fs::path(cfg.out) : fs::path(name + ".txt");
  write_file(path, format_qkp_benchmark(base, name));
  std::cout << "qkp base n=" << base.n_items << " capacity=" << base.capacity << " -> " << path.string() << '\n';
  return 0;
}

// --- run / tune / sweep / oracle ----------------------------------------------

void print_report_line(const ExperimentReport& r) {
  std::cout << variant_name(r.variant) << ' ' << r.instance_id << " T=" << fmt(r.horizon) << " A=" << fmt(r.penalty)
            << " p_suc=" << fmt(r.p_suc) << " c_ave=" << fmt(r.c_ave) << " residual=" << fmt(r.residual)
            << " p_fs=" << fmt(r.p_fs) << '\n';
}

void write_run_outputs(const RunConfig& cfg, const ExperimentReport& r) {
  const fs::path out(cfg.out);
  write_file(out / "report.json", nlohmann::json(r).dump(2) + "\n");
  write_file(out / "config.json", nlohmann::json(cfg).dump(2) + "\n");
  if (cfg.trace) {
    std::ostringstream trace;
    write_trace_csv(trace, r.optimization);
    write_file(out / "trace.csv", trace.str());
    std::ostringstream dist;
    write_distribution_csv(dist, r.final);
    write_file(out / "distribution.csv", dist.str());
    std::ostringstream raw;
    write_distribution_csv(raw, r.raw);
    write_file(out / "raw_distribution.csv", raw.str());
  }
}

int cmd_run(const RunConfig& cfg) {
  const auto ctx = load_context(cfg.instance);
  const auto spec = cfg.spec();
  const auto result = ensemble_run({spec}, {ctx}, cfg.policy(), 1);
  const auto& r = result.reports[0][0];
  write_run_outputs(cfg, r);
  print_report_line(r);
  return 0;
}

int cmd_tune(const RunConfig& cfg) {
  const auto ctx = load_context(cfg.instance);
  const auto spec = cfg.spec();
  const auto grid = cfg.penalty_grid.value_or(PenaltyGrid::defaults_for(ctx.instance()));
  auto tuner = spec;
  if (cfg.tune_with) {
    tuner = cfg.policy().tune_with.value();
    tuner.horizon = spec.horizon;
  }
  const auto tuned = tune_penalty(tuner, ctx, grid);
  const auto report = cfg.tune_with ? run_variant(spec, ctx, tuned.penalty) : tuned.report;

  nlohmann::json candidates = nlohmann::json::array();
  std::cout << "A,raw_p_fs,c_ave,admissible\n";
  for (const auto& c : tuned.candidates) {
    candidates.push_back({{"A", c.penalty},
                          {"raw_p_fs", c.raw_p_fs},
                          {"c_ave", c.c_ave ? nlohmann::json(*c.c_ave) : nlohmann::json(nullptr)},
                          {"admissible", c.admissible}});
    std::cout << fmt(c.penalty) << ',' << fmt(c.raw_p_fs) << ',' << fmt(c.c_ave) << ','
              << (c.admissible ? "yes" : "no") << '\n';
  }
  const nlohmann::json j{{"A", tuned.penalty}, {"candidates", candidates}, {"report", report}};
  write_file(fs::path(cfg.out) / "tune.json", j.dump(2) + "\n");
  write_file(fs::path(cfg.out) / "config.json", nlohmann::json(cfg).dump(2) + "\n");
  std::cout << "A* = " << fmt(tuned.penalty) << '\n';
  print_report_line(report);
  return 0;
}

int cmd_sweep(const RunConfig& cfg) {
  const auto ctxs = load_directory(cfg.instances);
  const auto variants = cfg.variants.empty() ? std::vector<std::string>{cfg.variant} : cfg.variants;
  const auto horizons = cfg.horizons.empty() ? std::vector<double>{cfg.horizon} : cfg.horizons;
  const auto layers = cfg.layers.empty() ? std::vector<std::size_t>{cfg.size} : cfg.layers;
  std::vector<VariantSpec> specs;
  for (const auto& v : variants) {
    for (double T : horizons) {
      for (std::size_t p : layers) {
        specs.push_back(cfg.spec(v, T, p));
      }
    }
  }
  const auto result = ensemble_run(specs, ctxs, cfg.policy(), std::max<std::size_t>(1, cfg.jobs));

  const fs::path out(cfg.out);
  std::ostringstream summary;
  write_summary_csv(summary, result.rows);
  write_file(out / "summary.csv", summary.str());
  std::ostringstream reports;
  std::ostringstream jsonl;
  reports << kReportCsvHeader << '\n';
  for (const auto& per_spec : result.reports) {
    for (const auto& r : per_spec) {
      write_report_csv_row(reports, r);
      jsonl << nlohmann::json(r).dump() << '\n';
    }
  }
  write_file(out / "reports.csv", reports.str());
  write_file(out / "reports.jsonl", jsonl.str());
  write_file(out / "config.json", nlohmann::json(cfg).dump(2) + "\n");
  std::cout << summary.str();
  return 0;
}

int cmd_oracle(const RunConfig& cfg, bool out_given) {
  const auto ctx = load_context(cfg.instance);
  std::size_t feasible = 0;
  for (std::uint64_t b = 0; b < (std::uint64_t{1} << ctx.n()); ++b) {
    feasible += ctx.feasible(b) ? 1 : 0;
  }
  nlohmann::json set = nlohmann::json::array();
  for (const auto& x : ctx.optima().optimal_set) {
    set.push_back(x.to_string());
  }
  const nlohmann::json j{{"instance", ctx.id()},
                         {"n", ctx.n()},
                         {"c_opt", ctx.optima().c_opt},
                         {"optimal_set", set},
                         {"feasible_count", feasible}};
  if (out_given) {
    write_file(fs::path(cfg.out) / "oracle.json", j.dump(2) + "\n");
  }
  std::cout << j.dump(2) << '\n';
  return 0;
}

PenaltyGrid parse_grid(const std::string& text) {
  double lo = 0.0;
  double step = 0.0;
  double hi = 0.0;
  char c1 = 0;
  char c2 = 0;
  std::istringstream in(text);
  if (!(in >> lo >> c1 >> step >> c2 >> hi) || c1 != ':' || c2 != ':' || !in.eof()) {
    throw UsageError("--A-grid expects min:step:max, got '" + text + "'");
  }
  PenaltyGrid g{lo, step, hi};
  g.values();
  return g;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator and experiment harness for variational quantum annealing with repair."};
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  std::string config_path;
  std::vector<std::pair<CLI::Option*, std::function<void()>>> overrides;
  auto bind = [&overrides](CLI::Option* opt, std::function<void()> apply) { overrides.emplace_back(opt, apply); };

  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  std::string out;
  double dt = 0.0;
  app.add_option("--config", config_path, "JSON run configuration; flags override its values")->check(CLI::ExistingFile);
  bind(app.add_option("--seed", seed, "Seed for generation and shot sampling"), [&] { cfg.seed = seed; });
  bind(app.add_option("--jobs", jobs, "Worker threads for sweeps")->check(CLI::PositiveNumber), [&] { cfg.jobs = jobs; });
  bind(app.add_option("--out", out, "Output file (gen) or directory"), [&] { cfg.out = out; });
  bind(app.add_option("--dt", dt, "RK4 time step override")->check(CLI::PositiveNumber), [&] { cfg.dt = dt; });
  bind(app.add_flag("--trace", "Write optimizer traces and distributions"), [&] { cfg.trace = true; });

  GenOptions gen_opts;
  auto* gen = app.add_subcommand("gen", "Generate a problem instance");
  gen->require_subcommand(1);
  auto* gen_gpp_cmd = gen->add_subcommand("gpp", "Random graph partitioning instance");
  gen_gpp_cmd->add_option("--nodes", gen_opts.nodes, "Even node count")->required();
  gen_gpp_cmd->add_option("--density", gen_opts.density, "Edge probability");
  gen_gpp_cmd->add_option("--count", gen_opts.count, "Instances from consecutive seeds")->check(CLI::PositiveNumber);
  auto* gen_qkp_cmd = gen->add_subcommand("qkp", "Quadratic knapsack instance derived from a 100-item base");
  gen_qkp_cmd->add_option("--items", gen_opts.items, "Item count")->required();
  gen_qkp_cmd->add_option("--base", gen_opts.base, "Base instance in benchmark text format")->check(CLI::ExistingFile);
  gen_qkp_cmd->add_option("--base-seed", gen_opts.base_seed, "Seed of a generated base (default --seed)");
  gen_qkp_cmd->add_option("--count", gen_opts.count, "Instances from consecutive base seeds")->check(CLI::PositiveNumber);
  auto* gen_base_cmd = gen->add_subcommand("qkp-base", "Random base instance in benchmark text format");
  gen_base_cmd->add_option("--items", gen_opts.items, "Item count")->default_val(100);
  gen_base_cmd->add_option("--density", gen_opts.density, "Profit density");

  // Options shared by run, tune and sweep.
  std::string variant, schedule, optimizer, grid_text, tune_with;
  std::size_t size = 0, max_iter = 0, shots = 0, top_k = 0;
  double horizon = 0.0, grid_res = 0.0, penalty = 0.0;
  std::string instance, instances;
  std::vector<std::string> variants;
  std::vector<double> horizons;
  std::vector<std::size_t> layers;

  auto add_common = [&](CLI::App* sub) {
    bind(sub->add_option("--variant", variant, "pVQA, VQA, pQA or QA"), [&] { cfg.variant = variant; });
    bind(sub->add_option("--schedule", schedule, "continuous, linear, qaoa or annealer"), [&] { cfg.schedule = schedule; });
    bind(sub->add_option("--size", size, "M for continuous, p for qaoa"), [&] { cfg.size = size; });
    bind(sub->add_option("-T,--horizon", horizon, "Annealing time")->check(CLI::PositiveNumber),
         [&] { cfg.horizon = horizon; });
    bind(sub->add_option("--optimizer", optimizer, "powell, grid, gradient or none"), [&] { cfg.optimizer = optimizer; });
    bind(sub->add_option("--max-iter", max_iter, "Optimizer iterations"), [&] { cfg.max_iter = max_iter; });
    bind(sub->add_option("--grid-res", grid_res, "Grid search resolution")->check(CLI::PositiveNumber),
         [&] { cfg.grid_resolution = grid_res; });
    bind(sub->add_option("--A-grid", grid_text, "Penalty grid min:step:max"),
         [&] { cfg.penalty_grid = parse_grid(grid_text); });
    bind(sub->add_option("--tune-with", tune_with, "Variant used to tune the penalty"), [&] { cfg.tune_with = tune_with; });
    bind(sub->add_option("--shots", shots, "Sample this many shots per evaluation")->check(CLI::PositiveNumber),
         [&] { cfg.shots = shots; });
    bind(sub->add_option("--top-k", top_k, "Keep the k best repaired shots")->check(CLI::PositiveNumber),
         [&] { cfg.top_k = top_k; });
  };

  auto* run = app.add_subcommand("run", "Run one variant on one instance");
  add_common(run);
  bind(run->add_option("--instance", instance, "Instance JSON file"), [&] { cfg.instance = instance; });
  bind(run->add_option("-A,--A,--penalty", penalty, "Fixed penalty coefficient (tuned when absent)")->check(CLI::PositiveNumber),
       [&] { cfg.penalty = penalty; });

  auto* tune = app.add_subcommand("tune", "Tune the penalty coefficient on a grid");
  add_common(tune);
  bind(tune->add_option("--instance", instance, "Instance JSON file"), [&] { cfg.instance = instance; });

  auto* sweep = app.add_subcommand("sweep", "Ensemble sweep over variants, annealing times and layer counts");
  add_common(sweep);
  bind(sweep->add_option("--instances", instances, "Directory of instance JSON files"),
       [&] { cfg.instances = instances; });
  bind(sweep->add_option("--variants", variants, "Variants to sweep")->delimiter(','), [&] { cfg.variants = variants; });
  bind(sweep->add_option("--T-list", horizons, "Annealing times to sweep")->delimiter(','),
       [&] { cfg.horizons = horizons; });
  bind(sweep->add_option("--p-list", layers, "Sizes (M or p) to sweep")->delimiter(','), [&] { cfg.layers = layers; });
  bind(sweep->add_option("-A,--A,--penalty", penalty, "Fixed penalty coefficient (tuned when absent)")
           ->check(CLI::PositiveNumber),
       [&] { cfg.penalty = penalty; });

  auto* oracle = app.add_subcommand("oracle", "Brute-force optima of an instance");
  bind(oracle->add_option("--instance", instance, "Instance JSON file"), [&] { cfg.instance = instance; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (!config_path.empty()) {
      cli::merge_json(nlohmann::json::parse(read_file(config_path)), cfg);
    }
    for (auto& [opt, apply] : overrides) {
      if (opt->count() > 0) {
        apply();
      }
    }
    const bool out_given = app.get_option("--out")->count() > 0 || (!config_path.empty() && cfg.out != ".");

    if (gen->parsed()) {
      if (gen_gpp_cmd->parsed()) {
        return cmd_gen_gpp(cfg, gen_opts, out_given);
      }
      if (gen_qkp_cmd->parsed()) {
        return cmd_gen_qkp(cfg, gen_opts, out_given);
      }
      return cmd_gen_base(cfg, gen_opts, out_given);
    }
    if (run->parsed()) {
      return cmd_run(cfg);
    }
    if (tune->parsed()) {
      return cmd_tune(cfg);
    }
    if (sweep->parsed()) {
      return cmd_sweep(cfg);
    }
    return cmd_oracle(cfg, out_given);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
