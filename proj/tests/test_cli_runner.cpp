#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "cantilever/config.hpp"
#include "cantilever/csv.hpp"
#include "cantilever/runner.hpp"
#include "cantilever/tensor_cache.hpp"

using namespace cantilever;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cantilever_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

const char* kMinimal = R"({"beam": {}, "n_modes": 3, "integrator": {"dt": 0.01}, "run": {"t_final": 0.1}})";

json small_run() {
  return json::parse(R"({
    "beam": {"k2": 0.05, "sigma": 1, "iota": 1},
    "n_modes": 3,
    "integrator": {"scheme": "implicit-midpoint", "dt": 0.002},
    "initial": [{"mode": 1, "q0": 0.1}, {"mode": 2, "v0": -0.2}],
    "forcing": {"preset": "harmonic", "p0": 0.1, "omega": 3.0},
    "run": {"t_final": 0.2, "record_every": 5, "snapshot_every": 10, "snapshot_points": 21}
  })");
}

std::string expect_config_error(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  FAIL("expected ConfigError for " << text);
  return {};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CANTILEVER_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("minimal config gets defaults and the echo reparses to the same values") {
  const SimulationConfig cfg = parse_config_text(kMinimal);
  CHECK(cfg.beam.D == 1.0);
  CHECK(cfg.beam.sigma == 1);
  CHECK(cfg.beam.iota == 0);
  CHECK(cfg.panels == kDefaultPanels);
  CHECK(cfg.integrator.scheme == Scheme::implicit_midpoint);
  CHECK(cfg.record_every == 1);
  const json echo = to_json(cfg);
  CHECK(to_json(parse_config(echo)) == echo);
}

TEST_CASE("config errors name the key") {
  CHECK(expect_config_error(R"({"beam": {"iota": 1}, "n_modes": 3, "integrator": {"dt": 0.01}, "run": {"t_final": 1}})")
            .find("--allow-undamped-inertia") != std::string::npos);
  CHECK(expect_config_error(R"({"beam": {}, "n_modes": 3, "integrator": {"dt": 0.01}, "run": {"t_final": 1},
                               "initial": [{"mode": 5, "q0": 1}]})")
            .find("initial.0.mode") != std::string::npos);
  CHECK(expect_config_error(R"({"beam": {"kk2": 1}, "n_modes": 3, "integrator": {"dt": 0.01}, "run": {"t_final": 1}})")
            .find("beam.kk2") != std::string::npos);
  CHECK(expect_config_error(R"({"beam": {}, "n_modes": "3", "integrator": {"dt": 0.01}, "run": {"t_final": 1}})")
            .find("n_modes") != std::string::npos);
  CHECK(expect_config_error(R"({"beam": {}, "n_modes": 3, "run": {"t_final": 1}})").find("integrator") !=
        std::string::npos);
  CHECK(expect_config_error(R"({"beam": {}, "n_modes": 3, "integrator": {"dt": 0.01}, "run": {"t_final": 1},
                               "forcing": {"preset": "gust"}})")
            .find("gust") != std::string::npos);
  CHECK(expect_config_error("{\"beam\": {},\n \"n_modes\": 3,,}").find("line 2") != std::string::npos);
  CHECK(expect_config_error(R"({"beam": {}, "n_modes": 17, "integrator": {"dt": 0.01}, "run": {"t_final": 1}})")
            .find("n_modes") != std::string::npos);
}

TEST_CASE("set_scalar addresses nested and indexed scalars") {
  json doc = small_run();
  set_scalar(doc, "beam.k2", 0.25);
  set_scalar(doc, "initial.1.v0", 3.0);
  set_scalar(doc, "n_modes", 4);
  CHECK(doc["beam"]["k2"] == 0.25);
  CHECK(doc["initial"][1]["v0"] == 3.0);
  CHECK(doc["n_modes"].is_number_integer());
  CHECK_THROWS_AS(set_scalar(doc, "n_modes", 2.5), ConfigError);
  CHECK_THROWS_AS(set_scalar(doc, "beam.missing", 1.0), ConfigError);
  CHECK_THROWS_AS(set_scalar(doc, "initial.7.q0", 1.0), ConfigError);
  CHECK_THROWS_AS(set_scalar(doc, "beam", 1.0), ConfigError);
  // an integer literal on a real-valued key still accepts fractions
  json amp = json::parse(R"({"initial": [{"mode": 1, "q0": 5}]})");
  set_scalar(amp, "initial.0.q0", 0.5);
  CHECK(amp["initial"][0]["q0"] == 0.5);
  CHECK_THROWS_AS(set_scalar(amp, "initial.0.mode", 1.5), ConfigError);
}

TEST_CASE("shortest round-trip formatting") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0}) {
    const std::string s = format_double(v);
    CHECK(std::stod(s) == v);
  }
  CHECK(format_double(0.1) == "0.1");
}

TEST_CASE("tensor cache round trip and exact-key invalidation") {
  const fs::path dir = scratch("cache");
  const QuadratureContext quad = build_context(8, 8, 1.0);
  const ModeBasis basis(3, 1.0, quad);
  BeamParameters p;
  p.k2 = 0.2;
  const DiscreteOperators fresh = assemble_cached(basis, quad, p, dir);
  const TensorCacheKey key{3, 1.0, 8, 8};
  REQUIRE(fs::exists(tensor_cache_file(dir, key)));
  const DiscreteOperators cached = assemble_cached(basis, quad, p, dir);
  CHECK(cached.S.data() == fresh.S.data());
  CHECK(cached.I.data() == fresh.I.data());
  CHECK(cached.kappa4 == fresh.kappa4);
  CHECK(cached.params.k2 == 0.2);
  CHECK_FALSE(load_tensors(dir, TensorCacheKey{3, 1.0, 16, 8}).has_value());
  CHECK_FALSE(load_tensors(dir, TensorCacheKey{3, 1.0 + 1e-15, 8, 8}).has_value());
}

TEST_CASE("simulate writes every artifact and is deterministic") {
  const fs::path a = scratch("sim_a"), b = scratch("sim_b");
  const SimulationConfig cfg = parse_config(small_run());
  const SimulationSummary s = simulate_to_directory(cfg, a, std::nullopt);
  simulate_to_directory(cfg, b, std::nullopt);
  CHECK(slurp(a / "trajectory.csv") == slurp(b / "trajectory.csv"));
  CHECK(fs::exists(a / "resolved_config.json"));
  CHECK(fs::exists(a / "summary.json"));
  // 100 steps recorded every 5: 21 records, snapshots at records 0, 10, 20
  CHECK(s.records == 21);
  CHECK(s.snapshots == 3);
  CHECK(fs::exists(a / "snapshots" / "snapshot_000010.csv"));
  const CsvTable t = read_csv(a / "trajectory.csv");
  CHECK(t.header == trajectory_header(3));
  CHECK(t.rows.size() == 21);
  const CsvTable snap = read_csv(a / "snapshots" / "snapshot_000020.csv");
  CHECK(snap.rows.size() == 21);
  CHECK(snap.has_column("u_tt"));
  const json summary = json::parse(slurp(a / "summary.json"));
  CHECK(summary["blowup"] == false);
  CHECK(summary.contains("wall_seconds"));
  CHECK(json::parse(slurp(a / "resolved_config.json")) == to_json(cfg));
}

TEST_CASE("zero data gives an all-zero trajectory") {
  const fs::path dir = scratch("zero");
  const SimulationConfig cfg = parse_config_text(kMinimal);
  simulate_to_directory(cfg, dir, std::nullopt);
  const CsvTable t = read_csv(dir / "trajectory.csv");
  for (const auto& row : t.rows)
    for (std::size_t c = 1; c < row.size(); ++c) CHECK(row[c] == 0.0);
}

TEST_CASE("sweep records each run and isolates failures") {
  const fs::path dir = scratch("sweep");
  json base = small_run();
  base["run"]["snapshot_every"] = 0;
  // a negative damping value is invalid for that run only
  const auto rows = run_sweep(base, "beam.k2", {0.02, -1.0, 0.04}, dir, std::nullopt, 2);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].status == "completed");
  CHECK(rows[1].status == "error");
  CHECK_FALSE(rows[1].message.empty());
  CHECK(rows[2].status == "completed");
  CHECK(fs::exists(dir / "run_002" / "trajectory.csv"));
  const std::string index = slurp(dir / "index.csv");
  CHECK(index.rfind("run,param,value,status", 0) == 0);
  CHECK(index.find("run_001,beam.k2,-1,error") != std::string::npos);

  CHECK_THROWS_AS(run_sweep(base, "beam.k2", {}, dir, std::nullopt, 1), InputError);
  CHECK_THROWS_AS(run_sweep(base, "beam.nothing", {1.0}, dir, std::nullopt, 1), ConfigError);
}

json large_data(double dt) {
  json doc = json::parse(R"({
    "beam": {"k2": 0.05, "sigma": 1, "iota": 1},
    "n_modes": 4,
    "integrator": {"scheme": "implicit-midpoint"},
    "initial": [{"mode": 1, "q0": 5}],
    "run": {"t_final": 1, "record_every": 50}
  })");
  doc["integrator"]["dt"] = dt;
  return doc;
}

TEST_CASE("large data baseline") {
  const fs::path dir = scratch("large");
  const SimulationSummary s = simulate_to_directory(parse_config(large_data(1e-4)), dir, std::nullopt);
  // pinned from the first validated run: no blow-up by t = 1
  CHECK_FALSE(s.blowup);
  CHECK(s.final_energy.total == doctest::Approx(206.80620294445083).epsilon(1e-8));
  CHECK(s.max_identity_residual < 2.0);
}

TEST_CASE("amplitude sweep separates completed, rejected and blown-up runs") {
  const fs::path dir = scratch("amplitude");
  const auto rows = run_sweep(large_data(1e-3), "initial.0.q0", {0.5, 10.0, 80.0}, dir, std::nullopt, 3);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].status == "completed");
  CHECK(rows[1].status == "error");
  CHECK(rows[1].message.find("Newton") != std::string::npos);
  CHECK(rows[2].status == "blowup");
  const std::string index = slurp(dir / "index.csv");
  CHECK(index.find("run_000,initial.0.q0,0.5,completed") != std::string::npos);
  CHECK(index.find("run_002,initial.0.q0,80,blowup") != std::string::npos);
}

TEST_CASE("converge metrics from trajectory files") {
  json base = small_run();
  base["run"]["record_every"] = 1;
  base["run"]["snapshot_every"] = 0;
  std::vector<fs::path> files;
  for (double dt : {0.004, 0.002, 0.001}) {
    base["integrator"]["dt"] = dt;
    const fs::path dir = scratch("conv_" + std::to_string(files.size()));
    simulate_to_directory(parse_config(base), dir, std::nullopt);
    files.push_back(dir / "trajectory.csv");
  }
  const auto pts = convergence_points(files, ConvergenceMetric::identity, {});
  REQUIRE(pts.size() == 3);
  CHECK(pts[0].first == doctest::Approx(0.004));
  CHECK(convergence_order(pts) == doctest::Approx(2.0).epsilon(0.1));
  CHECK(convergence_points(files, ConvergenceMetric::final_state, {}).size() == 2);
  CHECK_THROWS_AS(convergence_metric_from_string("bogus"), InputError);
}

TEST_CASE("command-line exit codes") {
  const fs::path dir = scratch("cli");
  {
    std::ofstream(dir / "ok.json") << small_run().dump();
    std::ofstream(dir / "bad.json") << R"({"beam": {"iota": 1}, "n_modes": 3, "integrator": {"dt": 0.01}, "run": {"t_final": 0.02}})";
  }
  CHECK(run_cli("modes --n 4") == 0);
  CHECK(run_cli("simulate --config " + (dir / "ok.json").string() + " --out " + (dir / "out").string()) == 0);
  CHECK(fs::exists(dir / "out" / "summary.json"));
  CHECK(run_cli("simulate --config " + (dir / "bad.json").string() + " --out " + (dir / "o2").string()) == 1);
  CHECK(run_cli("simulate --config " + (dir / "bad.json").string() + " --out " + (dir / "o3").string() +
                " --allow-undamped-inertia") == 0);
  CHECK(run_cli("simulate --out " + (dir / "o4").string()) == 1);
  CHECK(run_cli("frobnicate") == 1);
  CHECK(run_cli("") == 1);
  CHECK(run_cli("decay " + (dir / "out" / "trajectory.csv").string()) == 0);
  CHECK(run_cli("sweep --config " + (dir / "ok.json").string() + " --param beam.k2 --out " +
                (dir / "sw").string()) == 1);
}
