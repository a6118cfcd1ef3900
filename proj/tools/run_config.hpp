#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pvqa/harness.hpp"

namespace pvqa::cli {

/// Everything a run, sweep or tune needs. Serialises to JSON so that a run in
/// exact mode can be repeated from the written config alone.
struct RunConfig {
  std::string variant = "pVQA";
  std::string schedule = "linear";
  std::size_t size = 0;  // M or p; 0 picks 100 for continuous and 1 for qaoa
  double horizon = 1.0;
  std::optional<std::string> optimizer;
  std::optional<std::size_t> max_iter;
  double grid_resolution = 0.1;

  std::optional<double> penalty;  // tuned on the grid when absent
  std::optional<PenaltyGrid> penalty_grid;
  std::optional<std::string> tune_with;  // variant used for tuning, e.g. pQA

  std::optional<std::size_t> shots;
  std::optional<std::size_t> top_k;
  std::uint64_t seed = 0;
  std::optional<double> dt;
  bool trace = false;

  std::string instance;   // run, tune, oracle
  std::string instances;  // sweep: directory of instance JSON files
  std::string out = ".";
  std::size_t jobs = 1;

  std::vector<std::string> variants;  // sweep axes; empty means {variant}
  std::vector<double> horizons;       // empty means {horizon}
  std::vector<std::size_t> layers;    // empty means {size}

  VariantSpec spec() const;
  VariantSpec spec(const std::string& variant_name, double T, std::size_t size_value) const;
  PenaltyPolicy policy() const;
};

void to_json(nlohmann::json& j, const RunConfig& c);
/// Keys absent from `j` keep the values already in `c`.
void merge_json(const nlohmann::json& j, RunConfig& c);

}  // namespace pvqa::cli
