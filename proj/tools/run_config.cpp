#include "run_config.hpp"

#include <algorithm>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace pvqa::cli {

namespace {

std::size_t default_size(const std::string& schedule) {
  if (schedule == "continuous") {
    return 100;
  }
  if (schedule == "qaoa") {
    return 1;
  }
  return 0;
}

template <class T>
void read_optional(const nlohmann::json& j, const char* key, std::optional<T>& out) {
  if (!j.contains(key)) {
    return;
  }
  if (j.at(key).is_null()) {
    out.reset();
  } else {
    out = j.at(key).get<T>();
  }
}

template <class T>
nlohmann::json optional_json(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

VariantSpec RunConfig::spec() const { return spec(variant, horizon, size); }

VariantSpec RunConfig::spec(const std::string& variant_name, double T, std::size_t size_value) const {
  const std::size_t m = size_value ? size_value : default_size(schedule);
  auto s = VariantSpec::make(parse_variant(variant_name), ScheduleFamily::parse(schedule, m), T);
  if (is_variational(s.variant)) {
    if (optimizer) {
      s.optimizer = parse_optimizer(*optimizer);
    }
    if (max_iter) {
      s.max_iter = *max_iter;
    }
    s.grid_resolution = grid_resolution;
    if (s.optimizer == OptimizerKind::None) {
      s.fixed_params = s.family.initial(T);
    }
  }
  s.dt = dt;
  s.trace = trace;
  if (shots) {
    s.shots = ShotMode{*shots, top_k, seed};
  } else if (top_k) {
    throw std::invalid_argument("--top-k needs --shots");
  }
  s.validate();
  return s;
}

PenaltyPolicy RunConfig::policy() const {
  PenaltyPolicy p;
  p.fixed = penalty;
  p.grid = penalty_grid;
  if (tune_with) {
    auto t = VariantSpec::make(parse_variant(*tune_with), ScheduleFamily::linear(), horizon);
    t.dt = dt;
    p.tune_with = t;
  }
  return p;
}

void to_json(nlohmann::json& j, const RunConfig& c) {
  nlohmann::json grid = nullptr;
  if (c.penalty_grid) {
    grid = {{"min", c.penalty_grid->min}, {"step", c.penalty_grid->step}, {"max", c.penalty_grid->max}};
  }
  j = nlohmann::json{{"variant", c.variant},
                     {"schedule", c.schedule},
                     {"size", c.size},
                     {"T", c.horizon},
                     {"optimizer", optional_json(c.optimizer)},
                     {"max_iter", optional_json(c.max_iter)},
                     {"grid_resolution", c.grid_resolution},
                     {"penalty", optional_json(c.penalty)},
                     {"penalty_grid", grid},
                     {"tune_with", optional_json(c.tune_with)},
                     {"shots", optional_json(c.shots)},
                     {"top_k", optional_json(c.top_k)},
                     {"seed", c.seed},
                     {"dt", optional_json(c.dt)},
                     {"trace", c.trace},
                     {"instance", c.instance},
                     {"instances", c.instances},
                     {"out", c.out},
                     {"jobs", c.jobs},
                     {"variants", c.variants},
                     {"T_list", c.horizons},
                     {"p_list", c.layers}};
}

void merge_json(const nlohmann::json& j, RunConfig& c) {
  if (!j.is_object()) {
    throw std::invalid_argument("config file must hold a JSON object");
  }
  static const char* const known[] = {"variant", "schedule", "size",    "T",       "optimizer", "max_iter",
                                      "grid_resolution", "penalty", "penalty_grid", "tune_with", "shots",
                                      "top_k",   "seed",     "dt",      "trace",   "instance",  "instances",
                                      "out",     "jobs",     "variants", "T_list", "p_list"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
      throw std::invalid_argument("unknown config key '" + key + "'");
    }
  }
  c.variant = j.value("variant", c.variant);
  c.schedule = j.value("schedule", c.schedule);
  c.size = j.value("size", c.size);
  c.horizon = j.value("T", c.horizon);
  read_optional(j, "optimizer", c.optimizer);
  read_optional(j, "max_iter", c.max_iter);
  c.grid_resolution = j.value("grid_resolution", c.grid_resolution);
  read_optional(j, "penalty", c.penalty);
  if (j.contains("penalty_grid")) {
    const auto& g = j.at("penalty_grid");
    if (g.is_null()) {
      c.penalty_grid.reset();
    } else {
      c.penalty_grid = PenaltyGrid{g.at("min").get<double>(), g.at("step").get<double>(), g.at("max").get<double>()};
    }
  }
  read_optional(j, "tune_with", c.tune_with);
  read_optional(j, "shots", c.shots);
  read_optional(j, "top_k", c.top_k);
  c.seed = j.value("seed", c.seed);
  read_optional(j, "dt", c.dt);
  c.trace = j.value("trace", c.trace);
  c.instance = j.value("instance", c.instance);
  c.instances = j.value("instances", c.instances);
  c.out = j.value("out", c.out);
  c.jobs = j.value("jobs", c.jobs);
  c.variants = j.value("variants", c.variants);
  c.horizons = j.value("T_list", c.horizons);
  c.layers = j.value("p_list", c.layers);
}

}  // namespace pvqa::cli
