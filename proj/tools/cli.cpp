#include "cli.hpp"

#include "acceptance.hpp"

#include "rmt/cumulant_scan.hpp"
#include "rmt/error.hpp"
#include "rmt/experiment.hpp"
#include "rmt/json_util.hpp"
#include "rmt/replica_rg.hpp"
#include "rmt/spectral.hpp"
#include "rmt/svg_plot.hpp"
#include "rmt/version.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace rmt::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

// One invocation owns an output directory for its lifetime.
class OutputLock {
 public:
  explicit OutputLock(const fs::path& dir) : path_(dir / ".rmt.lock") {
    std::error_code ec;
    fs::create_directories(dir, ec);
    require(!ec && fs::is_directory(dir), ErrorKind::io, "cannot create output directory '" + dir.string() + "'");
    std::FILE* f = std::fopen(path_.c_str(), "wx");
    require(f != nullptr, ErrorKind::io,
            fs::exists(path_) ? "output directory '" + dir.string() + "' is locked (" + path_.string() + " exists)"
                              : "cannot write to output directory '" + dir.string() + "'");
    std::fclose(f);
  }
  ~OutputLock() {
    std::error_code ec;
    fs::remove(path_, ec);
  }
  OutputLock(const OutputLock&) = delete;
  OutputLock& operator=(const OutputLock&) = delete;

 private:
  fs::path path_;
};

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(f), ErrorKind::io, "cannot write '" + path.string() + "'");
  f << bytes;
  f.close();
  require(static_cast<bool>(f), ErrorKind::io, "error writing '" + path.string() + "'");
}

std::string read_file(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  require(static_cast<bool>(f), ErrorKind::io, "cannot open '" + path.string() + "'");
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::optional<unsigned> threads;
};

ExperimentConfig load(const Common& c, bool required) {
  ExperimentConfig cfg;
  if (!c.config_path.empty())
    cfg = ExperimentConfig::from_file(c.config_path);
  else
    require(!required, ErrorKind::parameter, "--config is required for this command");
  if (c.seed) cfg.seed = *c.seed;
  if (!c.out_dir.empty()) cfg.outputs = c.out_dir;
  if (c.threads) cfg.threads = *c.threads;
  return cfg;
}

const EnsembleSpec& need_ensemble(const ExperimentConfig& cfg) {
  require(cfg.ensemble.has_value(), ErrorKind::parameter, "ensemble: missing");
  return *cfg.ensemble;
}

void need_grid(const ExperimentConfig& cfg) { require(!cfg.n_grid.empty(), ErrorKind::parameter, "N_grid: empty"); }

json metadata(const std::string& command, const ExperimentConfig& cfg, const std::vector<std::string>& files,
              const std::vector<std::string>& warnings) {
  json j = {{"schema", "rmt-metadata/1"},
            {"command", command},
            {"rmt_version", kVersion},
            {"seed", cfg.seed},
            {"config", cfg.to_json()},
            {"files", files},
            {"warnings", warnings}};
  if (cfg.ensemble) j["spec_hash"] = spec_hash(*cfg.ensemble);
  // Outputs do not depend on the worker count.
  j["config"].erase("threads");
  return j;
}

void write_metadata(const fs::path& dir, const json& j) { write_file(dir / "metadata.json", j.dump(2) + "\n"); }

const char* kSpectraHeader = "N,sample,index,eigenvalue\n";

int cmd_sample(const Common& c, std::ostream& out) {
  const ExperimentConfig cfg = load(c, true);
  const EnsembleSpec& spec = need_ensemble(cfg);
  need_grid(cfg);
  const fs::path dir(cfg.outputs);
  OutputLock lock(dir);
  std::vector<std::string> files, warnings;
  for (std::size_t n : cfg.n_grid) {
    const auto spectra = sample_spectra(spec, n, cfg.samples_per_n, {cfg.seed, 0}, &warnings, cfg.threads);
    std::string csv = kSpectraHeader;
    for (std::size_t s = 0; s < spectra.size(); ++s)
      for (std::size_t i = 0; i < spectra[s].eigs_scaled.size(); ++i)
        csv += std::to_string(n) + "," + std::to_string(s) + "," + std::to_string(i) + "," +
               g17(spectra[s].eigs_scaled[i]) + "\n";
    const std::string name = "spectra_N" + std::to_string(n) + ".csv";
    write_file(dir / name, csv);
    files.push_back(name);
  }
  write_metadata(dir, metadata("sample", cfg, files, warnings));
  out << "wrote " << files.size() << " spectra file(s) to " << dir.string() << "\n";
  for (const auto& w : warnings) out << "warning: " << w << "\n";
  return 0;
}

int cmd_moments(const Common& c, std::ostream& out) {
  const ExperimentConfig cfg = load(c, true);
  const EnsembleSpec& spec = need_ensemble(cfg);
  need_grid(cfg);
  require(!cfg.moment_orders.empty(), ErrorKind::parameter, "moment_orders: empty");
  const fs::path dir(cfg.outputs);
  OutputLock lock(dir);
  std::vector<std::string> warnings;
  std::string csv = "N,k,mean,stderr,gap\n";
  for (std::size_t n : cfg.n_grid) {
    const auto spectra = sample_spectra(spec, n, cfg.samples_per_n, {cfg.seed, 0}, &warnings, cfg.threads);
    for (const auto& r : moment_rows(spectra, cfg.moment_orders, spec.sigma))
      csv += std::to_string(r.n) + "," + std::to_string(r.k) + "," + g17(r.mean) + "," + g17(r.stderr_) + "," +
             g17(r.gap) + "\n";
  }
  write_file(dir / "moments.csv", csv);
  write_metadata(dir, metadata("moments", cfg, {"moments.csv"}, warnings));
  out << csv;
  return 0;
}

int cmd_cumulant_scan(const Common& c, std::ostream& out) {
  const ExperimentConfig cfg = load(c, true);
  const EnsembleSpec& spec = need_ensemble(cfg);
  need_grid(cfg);
  const fs::path dir(cfg.outputs);
  OutputLock lock(dir);
  const auto rows =
      cumulant_scan(spec, cfg.graphs_to_scan, cfg.n_grid, cfg.samples_per_n, {cfg.seed, 0}, cfg.thresholds, cfg.threads);
  std::string csv = "N,graph,scaled_estimate,stderr,verdict\n";
  for (const auto& r : rows)
    csv += std::to_string(r.n) + "," + quoted(r.graph) + "," + g17(r.scaled_estimate) + "," + g17(r.stderr_) + "," +
           to_string(r.verdict) + "\n";
  write_file(dir / "cumulant_scan.csv", csv);
  write_metadata(dir, metadata("cumulant-scan", cfg, {"cumulant_scan.csv"}, {}));
  out << csv;
  return 0;
}

struct RgArgs {
  std::optional<int> order;
  std::string sigma;
  std::optional<int> max_edges;
  std::string perturbations;
};

int cmd_rg_flow(const Common& c, const RgArgs& a, std::ostream& out) {
  ExperimentConfig cfg = load(c, false);
  RgFlowConfig& rg = cfg.rg_flow;
  if (a.order) rg.order = *a.order;
  if (!a.sigma.empty()) {
    try {
      rg.sigma = parse_rational(a.sigma);
    } catch (const Error& e) {
      fail(ErrorKind::parameter, std::string("--sigma: ") + e.what());
    }
    require(rg.sigma > 0, ErrorKind::parameter, "--sigma: must be > 0");
  }
  if (a.max_edges) rg.max_edges = *a.max_edges;
  if (!a.perturbations.empty())
    rg.perturbations = rg::CumulantSpec::from_json(json_util::parse_file(a.perturbations), "perturbations");
  require(rg.order >= 1, ErrorKind::parameter, "order: must be >= 1");
  const int flow_order = std::max(0, rg.order - 2);
  require(flow_order <= rg::kMaxFlowOrder, ErrorKind::capacity,
          "order " + std::to_string(rg.order) + " needs flow order " + std::to_string(flow_order) +
              "; at most " + std::to_string(rg::kMaxFlowOrder) + " supported");

  rg::CumulantSpec spec = rg::gaussian_cumulant_spec(rg.sigma * rg.sigma);
  for (const auto& [label, e] : rg.perturbations.entries) spec.add(e.graph, e.value, e.gaussian);
  rg::FlowOptions opts;
  opts.max_edges = rg.max_edges;
  opts.horizon = rg.horizon ? *rg.horizon : flow_order;

  const fs::path dir(cfg.outputs);
  OutputLock lock(dir);
  const rg::FlowState state = rg::integrate_flow(rg::initial_potential(spec, opts), flow_order);
  write_file(dir / "flow.json", state.to_json().dump() + "\n");
  const auto coeffs = rg::extract_resolvent(state, rg.order);
  std::string line;
  for (std::size_t i = 0; i < coeffs.size(); ++i) line += (i ? ", " : "") + rmt::to_string(coeffs[i]);
  write_file(dir / "resolvent.txt", line + "\n");

  const rg::BoundsReport report = rg::check_bounds_flow(state, spec);
  std::string csv = "graph,t_order,kind,n_power,scaled_half_power,ok\n";
  for (const auto& e : report.entries)
    csv += quoted(e.graph) + "," + std::to_string(e.t_order) + "," + rg::to_string(e.kind) + ",0," +
           std::to_string(e.scaled_half_power) + "," + (e.ok ? "true" : "false") + "\n";
  for (const auto& e : report.higher_n_violations)
    csv += quoted(e.graph) + "," + std::to_string(e.t_order) + ",higher_n," + std::to_string(e.n_power) + "," +
           std::to_string(e.scaled_half_power) + ",false\n";
  write_file(dir / "bounds.csv", csv);
  json meta = metadata("rg-flow", cfg, {"flow.json", "resolvent.txt", "bounds.csv"}, {});
  meta["rg_flow"] = {{"order", rg.order},
                     {"sigma", rmt::to_string(rg.sigma)},
                     {"max_edges", rg.max_edges},
                     {"horizon", *opts.horizon},
                     {"truncated", state.truncated()}};
  meta.erase("seed");
  write_metadata(dir, meta);

  out << line << "\n";
  if (!report.all_ok()) {
    for (const auto& e : report.entries)
      if (!e.ok)
        out << "bound violated: " << e.graph << " t^" << e.t_order << " (" << rg::to_string(e.kind)
            << ", scaled N^(" << e.scaled_half_power << "/2))\n";
    fail(ErrorKind::invariant, "scaling bound violated in the n^0 grade");
  }
  return 0;
}

struct PlotArgs {
  std::string input;
  std::string sigma;
  std::optional<int> bins;
};

int cmd_plot(const Common& c, const PlotArgs& a, std::ostream& out) {
  const ExperimentConfig cfg = load(c, a.input.empty());
  fs::path input = a.input;
  if (input.empty()) {
    need_grid(cfg);
    const std::size_t n = cfg.plot.n ? *cfg.plot.n : cfg.n_grid.back();
    input = fs::path(cfg.outputs) / ("spectra_N" + std::to_string(n) + ".csv");
  }
  double sigma = cfg.ensemble ? cfg.ensemble->sigma : 1.0;
  if (!a.sigma.empty()) sigma = to_double(parse_rational(a.sigma));
  const std::string text = read_file(input);
  require(text.rfind(kSpectraHeader, 0) == 0, ErrorKind::parameter,
          input.string() + ": expected header " + std::string(kSpectraHeader, std::strlen(kSpectraHeader) - 1));
  std::vector<double> values;
  std::size_t n_seen = 0;
  std::istringstream lines(text.substr(std::strlen(kSpectraHeader)));
  std::string row;
  std::size_t lineno = 1;
  while (std::getline(lines, row)) {
    ++lineno;
    if (row.empty()) continue;
    std::size_t n = 0, s = 0, i = 0;
    double x = 0;
    require(std::sscanf(row.c_str(), "%zu,%zu,%zu,%lf", &n, &s, &i, &x) == 4, ErrorKind::parameter,
            input.string() + ":" + std::to_string(lineno) + ": malformed row");
    n_seen = n;
    values.push_back(x);
  }
  require(!values.empty(), ErrorKind::parameter, input.string() + ": no data rows");
  SpectrumPlotOptions opts;
  opts.sigma = sigma;
  opts.bins = a.bins ? *a.bins : cfg.plot.bins;
  opts.title = "Eigenvalue density, N = " + std::to_string(n_seen);
  const std::string svg = spectrum_svg(values, opts);
  const fs::path dir(c.out_dir.empty() ? cfg.outputs : c.out_dir);
  OutputLock lock(dir);
  const std::string name = "spectrum_N" + std::to_string(n_seen) + ".svg";
  write_file(dir / name, svg);
  out << "wrote " << (dir / name).string() << "\n";
  return 0;
}

int cmd_verify(const Common& c, const std::string& suite, std::ostream& out) {
  if (!suite.empty()) {
    const auto results = acceptance::run_suite(suite, out);
    bool ok = true;
    for (const auto& r : results) ok = ok && r.passed;
    return ok ? 0 : 4;
  }
  const ExperimentConfig cfg = load(c, true);
  out << "config ok\n" << cfg.to_json().dump(2) << "\n";
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Random-matrix semicircle experiments", "rmt"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "Experiment config (JSON)");
    sub->add_option("--seed", common.seed, "Override the config seed");
    sub->add_option("--out", common.out_dir, "Override the output directory");
    sub->add_option("--threads", common.threads, "Worker threads (0 = hardware)");
  };
  auto* sample = app.add_subcommand("sample", "Sample spectra to CSV");
  auto* moments = app.add_subcommand("moments", "Spectral moments per N");
  auto* scan = app.add_subcommand("cumulant-scan", "Scaled entry-cumulant scan with bound verdicts");
  auto* flow = app.add_subcommand("rg-flow", "Exact replica flow and resolvent series");
  auto* plot = app.add_subcommand("plot", "SVG histogram with the semicircle density");
  auto* verify = app.add_subcommand("verify", "Run acceptance suites or validate a config");
  for (auto* s : {sample, moments, scan, flow, plot, verify}) add_common(s);

  RgArgs rg;
  flow->add_option("--order", rg.order, "Number of resolvent coefficients K");
  flow->add_option("--sigma", rg.sigma, "Entry scale, exact rational (e.g. 1 or 3/2)");
  flow->add_option("--max-edges", rg.max_edges, "Largest graph kept in the flow (<= 8)");
  flow->add_option("--perturbations", rg.perturbations, "JSON file with extra cumulant graphs");
  PlotArgs pa;
  plot->add_option("--input", pa.input, "Spectra CSV written by `rmt sample`");
  plot->add_option("--sigma", pa.sigma, "Scale of the reference semicircle");
  plot->add_option("--bins", pa.bins, "Histogram bins");
  std::string suite;
  verify->add_option("--suite", suite, "Acceptance suite: all, exact, monte-carlo, repro, or 1..10");

  std::vector<const char*> argv = {"rmt"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (sample->parsed()) return cmd_sample(common, out);
    if (moments->parsed()) return cmd_moments(common, out);
    if (scan->parsed()) return cmd_cumulant_scan(common, out);
    if (flow->parsed()) return cmd_rg_flow(common, rg, out);
    if (plot->parsed()) return cmd_plot(common, pa, out);
    if (verify->parsed()) return cmd_verify(common, suite, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace rmt::cli
