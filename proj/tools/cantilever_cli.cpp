// Command-line front end: modes, simulate, sweep, decay, converge.
//
// Exit codes: 0 success (a flagged blow-up is a result, not a failure),
// 1 usage or configuration error, 2 numerical failure.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cantilever/config.hpp"
#include "cantilever/csv.hpp"
#include "cantilever/diagnostics.hpp"
#include "cantilever/error.hpp"
#include "cantilever/mode_basis.hpp"
#include "cantilever/quadrature.hpp"
#include "cantilever/runner.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cantilever;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;

struct GlobalOptions {
  std::string config;
  std::string out;
  std::string tensor_cache;
  int threads = 1;
  bool allow_undamped_inertia = false;

  std::optional<fs::path> cache() const {
    if (tensor_cache.empty()) return std::nullopt;
    return fs::path(tensor_cache);
  }
};

json config_document(const GlobalOptions& g) {
  if (g.config.empty()) throw ConfigError("--config <path> is required for this subcommand");
  json doc = read_config_json(g.config);
  if (g.allow_undamped_inertia && doc.is_object()) doc["allow_undamped_inertia"] = true;
  return doc;
}

SimulationConfig config_from(const GlobalOptions& g) {
  const json doc = config_document(g);
  try {
    return parse_config(doc);
  } catch (const ConfigError& e) {
    throw ConfigError(g.config + ": " + e.what());
  }
}

fs::path required_out(const GlobalOptions& g) {
  if (g.out.empty()) throw InputError("--out <dir> is required for this subcommand");
  return g.out;
}

// A bare double keeps the JSON readable; non-finite values become null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

int cmd_modes(const GlobalOptions& g, int n, double length, int panels, int points) {
  if (!g.config.empty()) {
    const SimulationConfig cfg = config_from(g);
    n = cfg.n_modes;
    length = cfg.beam.L;
    panels = cfg.panels;
    points = cfg.points_per_panel;
  }
  const QuadratureContext quad = build_context(panels, points, length);
  const ModeBasis basis(n, length, quad);
  if (g.out.empty()) {
    write_modes_csv(std::cout, basis);
  } else {
    std::ofstream out(g.out);
    if (!out) throw InputError("cannot write " + g.out);
    write_modes_csv(out, basis);
  }
  return kExitOk;
}

int cmd_simulate(const GlobalOptions& g) {
  const SimulationConfig cfg = config_from(g);
  const SimulationSummary summary = simulate_to_directory(cfg, required_out(g), g.cache());
  json brief = to_json(summary);
  brief["out"] = g.out;
  std::cout << brief.dump(2) << '\n';
  return kExitOk;
}

int cmd_sweep(const GlobalOptions& g, const std::string& param, std::vector<double> values,
              int sample, const std::vector<double>& range) {
  const json base = config_document(g);
  if (sample > 0) {
    if (!values.empty()) throw InputError("sweep: give either --values or --sample, not both");
    if (range.size() != 2 || !(range[0] < range[1]))
      throw InputError("sweep: --sample needs --range lo hi with lo < hi");
    const std::uint64_t seed = base.contains("seed") && base["seed"].is_number_unsigned()
                                   ? base["seed"].get<std::uint64_t>()
                                   : 0;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(range[0], range[1]);
    for (int k = 0; k < sample; ++k) values.push_back(dist(rng));
  }
  const auto rows = run_sweep(base, param, values, required_out(g), g.cache(), g.threads);
  json report = json::array();
  for (const auto& r : rows) {
    json row{{"value", r.value}, {"status", r.status}};
    if (r.status == "blowup") row["blowup_time"] = r.summary.blowup_time;
    if (r.decay) row["omega"] = number(r.decay->omega);
    if (!r.message.empty()) row["message"] = r.message;
    report.push_back(row);
  }
  std::cout << report.dump(2) << '\n';
  return kExitOk;
}

int cmd_decay(const std::vector<std::string>& files, std::optional<double> t_start,
              std::optional<double> t_end, std::optional<double> floor) {
  json report = json::array();
  for (const auto& file : files) {
    const CsvTable table = read_csv(file);
    const auto t = table.column("t");
    const auto e = table.column("E_total");
    if (t.empty()) throw InputError(file + ": no rows");
    const double lo = t_start.value_or(t.front());
    const double hi = t_end.value_or(t.back());
    const double fl = floor.value_or(std::max(e.front() * 1e-12, 1e-300));
    const DecayFit fit = fit_decay_rate(t, e, lo, hi, fl);
    report.push_back({{"file", file},
                      {"omega", number(fit.omega)},
                      {"M", number(fit.M)},
                      {"r2", number(fit.r2)},
                      {"samples", fit.samples},
                      {"t_start", lo},
                      {"t_end", hi},
                      {"floor", fl}});
  }
  std::cout << (report.size() == 1 ? report[0] : report).dump(2) << '\n';
  return kExitOk;
}

int cmd_converge(const std::vector<std::string>& files, const std::string& metric_name,
                 const std::vector<double>& dts) {
  const ConvergenceMetric metric = convergence_metric_from_string(metric_name);
  std::vector<fs::path> paths(files.begin(), files.end());
  const auto points = convergence_points(paths, metric, dts);
  json pts = json::array();
  for (const auto& [dt, err] : points) pts.push_back({{"dt", dt}, {"error", number(err)}});
  json report{{"metric", metric_name}, {"points", pts}};
  report["order"] = points.size() >= 3 ? number(convergence_order(points)) : json(nullptr);
  std::cout << report.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Galerkin simulation of an inextensible cantilever beam"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--config", g.config, "experiment configuration (JSON)");
  app.add_option("--out", g.out, "output directory, or output file for `modes`");
  app.add_option("--tensor-cache", g.tensor_cache, "directory for cached assembled tensors");
  app.add_option("--threads", g.threads, "sweep worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--allow-undamped-inertia", g.allow_undamped_inertia,
               "permit iota = 1 with k2 = 0");

  auto* modes = app.add_subcommand("modes", "print wavenumbers and mode coefficients as CSV");
  int n_modes = 10;
  double length = 1.0;
  int panels = kDefaultPanels, points = kDefaultPointsPerPanel;
  modes->add_option("--n", n_modes, "number of modes")->check(CLI::Range(1, kMaxModes));
  modes->add_option("--L", length, "beam length");
  modes->add_option("--panels", panels, "quadrature panels");
  modes->add_option("--points-per-panel", points, "Gauss points per panel");

  auto* simulate = app.add_subcommand("simulate", "run one configuration");

  auto* sweep = app.add_subcommand("sweep", "run one configuration per parameter value");
  std::string param;
  std::vector<double> values, range;
  int sample = 0;
  sweep->add_option("--param", param, "dotted config path, e.g. beam.k2")->required();
  sweep->add_option("--values", values, "explicit parameter values");
  sweep->add_option("--sample", sample, "draw this many values uniformly from --range")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--range", range, "lo hi for --sample")->expected(2);

  auto* decay = app.add_subcommand("decay", "fit E <= M exp(-omega t) to trajectory CSVs");
  std::vector<std::string> decay_files;
  std::optional<double> t_start, t_end, floor;
  decay->add_option("files", decay_files, "trajectory CSV files")->required()->check(CLI::ExistingFile);
  decay->add_option("--t-start", t_start, "fit window start");
  decay->add_option("--t-end", t_end, "fit window end");
  decay->add_option("--floor", floor, "truncate at the first energy at or below this");

  auto* converge = app.add_subcommand("converge", "estimate the dt order from a refinement series");
  std::vector<std::string> converge_files;
  std::string metric = "identity";
  std::vector<double> dts;
  converge->add_option("files", converge_files, "trajectory CSVs, coarsest first")
      ->required()
      ->check(CLI::ExistingFile);
  converge->add_option("--metric", metric, "identity | energy-drift | final-state");
  converge->add_option("--dt", dts, "step size per file (default: inferred from t)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*modes) return cmd_modes(g, n_modes, length, panels, points);
    if (*simulate) return cmd_simulate(g);
    if (*sweep) return cmd_sweep(g, param, values, sample, range);
    if (*decay) return cmd_decay(decay_files, t_start, t_end, floor);
    if (*converge) return cmd_converge(converge_files, metric, dts);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitUsage;
}
