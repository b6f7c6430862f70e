#pragma once

// Experiment configuration consumed by the command-line tool.

#include "rmt/ensembles.hpp"
#include "rmt/graph.hpp"
#include "rmt/replica_rg.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rmt {

inline constexpr const char* kExperimentSchema = "rmt-experiment/1";

struct RgFlowConfig {
  int order = 7;  // number of resolvent coefficients
  Rational sigma = 1;
  int max_edges = 6;
  std::optional<int> horizon;  // defaults to order - 2
  rg::CumulantSpec perturbations;
};

struct PlotConfig {
  int bins = 60;
  std::optional<std::size_t> n;  // which N to plot; largest when absent
};

struct ExperimentConfig {
  std::optional<EnsembleSpec> ensemble;
  std::vector<std::size_t> n_grid;
  std::size_t samples_per_n = 1;
  std::uint64_t seed = 0;
  std::string outputs = "rmt_out";
  std::vector<int> moment_orders = {2, 4};
  std::vector<CumulantGraph> graphs_to_scan;
  unsigned threads = 0;
  BoundThresholds thresholds;
  RgFlowConfig rg_flow;
  PlotConfig plot;

  /// Strict parse: unknown fields and wrong types are parameter errors naming
  /// the field path.
  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig from_file(const std::string& path);
  nlohmann::json to_json() const;
};

}  // namespace rmt
