#include "rmt/experiment.hpp"

#include "rmt/error.hpp"
#include "rmt/json_util.hpp"

namespace rmt {

using nlohmann::json;

namespace {

template <class T>
std::vector<T> integer_list(const json& j, const char* key, long min_value) {
  std::vector<T> out;
  const std::string at = std::string(key);
  require(j.at(key).is_array(), ErrorKind::parameter, at + ": expected an array of integers");
  for (std::size_t i = 0; i < j.at(key).size(); ++i) {
    const json& v = j.at(key)[i];
    require(v.is_number_integer() && v.get<long>() >= min_value, ErrorKind::parameter,
            at + "[" + std::to_string(i) + "]: expected an integer >= " + std::to_string(min_value));
    out.push_back(static_cast<T>(v.get<long>()));
  }
  return out;
}

RgFlowConfig parse_rg(const json& j) {
  using namespace json_util;
  const std::string path = "rg_flow";
  reject_unknown(j, {"order", "sigma", "max_edges", "horizon", "perturbations"}, path);
  RgFlowConfig c;
  c.order = static_cast<int>(get_integer(j, "order", path, c.order));
  if (j.contains("sigma")) c.sigma = get_rational(j, "sigma", path);
  require(c.sigma > 0, ErrorKind::parameter, "rg_flow.sigma: must be > 0");
  c.max_edges = static_cast<int>(get_integer(j, "max_edges", path, c.max_edges));
  if (j.contains("horizon")) c.horizon = static_cast<int>(get_integer(j, "horizon", path, 0));
  if (j.contains("perturbations")) c.perturbations = rg::CumulantSpec::from_json(j.at("perturbations"), "rg_flow.perturbations");
  return c;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  using namespace json_util;
  require_object(j, "config");
  reject_unknown(j,
                 {"schema", "ensemble", "N_grid", "samples_per_N", "seed", "outputs", "moment_orders",
                  "graphs_to_scan", "threads", "bound_thresholds", "rg_flow", "plot"},
                 "config");
  require(j.contains("schema"), ErrorKind::parameter, "schema: missing (expected \"" + std::string(kExperimentSchema) + "\")");
  require(get_string(j, "schema", "config", "") == kExperimentSchema, ErrorKind::parameter,
          "schema: unsupported value, expected \"" + std::string(kExperimentSchema) + "\"");

  ExperimentConfig c;
  if (j.contains("ensemble")) {
    c.ensemble = EnsembleSpec::from_json(j.at("ensemble"), "ensemble");
  }
  if (j.contains("N_grid")) {
    c.n_grid = integer_list<std::size_t>(j, "N_grid", 1);
    for (std::size_t i = 1; i < c.n_grid.size(); ++i)
      require(c.n_grid[i] > c.n_grid[i - 1], ErrorKind::parameter, "N_grid: must be strictly ascending");
  }
  if (j.contains("samples_per_N")) {
    const long s = get_integer(j, "samples_per_N", "config", 1);
    require(s >= 1, ErrorKind::parameter, "samples_per_N: must be >= 1");
    c.samples_per_n = static_cast<std::size_t>(s);
  }
  if (j.contains("seed")) {
    const json& s = j.at("seed");
    require(s.is_number_unsigned() || (s.is_number_integer() && s.get<long long>() >= 0), ErrorKind::parameter,
            "seed: expected a non-negative 64-bit integer");
    c.seed = s.get<std::uint64_t>();
  }
  c.outputs = get_string(j, "outputs", "config", c.outputs);
  require(!c.outputs.empty(), ErrorKind::parameter, "outputs: must not be empty");
  if (j.contains("moment_orders")) {
    c.moment_orders = integer_list<int>(j, "moment_orders", 1);
    for (int k : c.moment_orders) require(k <= 12, ErrorKind::parameter, "moment_orders: orders above 12 unsupported");
  }
  if (j.contains("graphs_to_scan")) {
    require(j.at("graphs_to_scan").is_array(), ErrorKind::parameter, "graphs_to_scan: expected an array of strings");
    for (std::size_t i = 0; i < j.at("graphs_to_scan").size(); ++i) {
      const json& g = j.at("graphs_to_scan")[i];
      const std::string at = "graphs_to_scan[" + std::to_string(i) + "]";
      require(g.is_string(), ErrorKind::parameter, at + ": expected a graph string");
      try {
        c.graphs_to_scan.push_back(CumulantGraph::parse(g.get<std::string>()));
      } catch (const Error& e) {
        fail(ErrorKind::parameter, at + ": " + e.what());
      }
    }
  }
  if (j.contains("threads")) {
    const long t = get_integer(j, "threads", "config", 0);
    require(t >= 0 && t <= 1024, ErrorKind::parameter, "threads: expected 0..1024");
    c.threads = static_cast<unsigned>(t);
  }
  if (j.contains("bound_thresholds")) {
    const json& b = j.at("bound_thresholds");
    const std::string at = "bound_thresholds";
    reject_unknown(b, {"min_decrease", "tau_factor", "max_growth", "noise_sigmas"}, at);
    c.thresholds.min_decrease = get_number(b, "min_decrease", at, c.thresholds.min_decrease);
    c.thresholds.tau_factor = get_number(b, "tau_factor", at, c.thresholds.tau_factor);
    c.thresholds.max_growth = get_number(b, "max_growth", at, c.thresholds.max_growth);
    c.thresholds.noise_sigmas = get_number(b, "noise_sigmas", at, c.thresholds.noise_sigmas);
  }
  if (j.contains("rg_flow")) c.rg_flow = parse_rg(j.at("rg_flow"));
  if (j.contains("plot")) {
    const json& p = j.at("plot");
    reject_unknown(p, {"bins", "N"}, "plot");
    c.plot.bins = static_cast<int>(get_integer(p, "bins", "plot", c.plot.bins));
    require(c.plot.bins >= 1 && c.plot.bins <= 1000, ErrorKind::parameter, "plot.bins: expected 1..1000");
    if (p.contains("N")) c.plot.n = static_cast<std::size_t>(get_integer(p, "N", "plot", 0));
  }
  return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) { return from_json(json_util::parse_file(path)); }

json ExperimentConfig::to_json() const {
  json graphs = json::array();
  for (const auto& g : graphs_to_scan) graphs.push_back(g.to_text());
  json j = {{"schema", kExperimentSchema},
            {"N_grid", n_grid},
            {"samples_per_N", samples_per_n},
            {"seed", seed},
            {"outputs", outputs},
            {"moment_orders", moment_orders},
            {"graphs_to_scan", graphs},
            {"threads", threads}};
  if (ensemble) j["ensemble"] = ensemble->to_json();
  return j;
}

}  // namespace rmt
