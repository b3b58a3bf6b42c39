#include "cantilever/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <thread>

#include "cantilever/csv.hpp"
#include "cantilever/field_reconstruction.hpp"
#include "cantilever/tensor_cache.hpp"

namespace cantilever {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

ModalState initial_state(const SimulationConfig& cfg) {
  ModalState s = ModalState::zero(cfg.n_modes);
  for (const auto& e : cfg.initial) {
    s.q[e.mode - 1] = e.q0;
    s.v[e.mode - 1] = e.v0;
  }
  return s;
}

std::string numbered(const char* prefix, int index, int width) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s%0*d", prefix, width, index);
  return buf;
}

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

json energy_json(const EnergyRecord& e) {
  return {{"t", e.t},
          {"E_kinetic", e.kinetic},
          {"E_inertial", e.inertial},
          {"E_bend", e.bend},
          {"E_nl", e.nonlinear},
          {"E_total", e.total},
          {"dissipation_accum", e.dissipation_accum},
          {"work_accum", e.work_accum},
          {"identity_residual", e.identity_residual}};
}

}  // namespace

LoadFunction Experiment::load() const {
  if (forcing.is_zero()) return {};
  return [this](double t) { return forcing.load(t); };
}

Experiment prepare_experiment(const SimulationConfig& cfg,
                              const std::optional<fs::path>& tensor_cache) {
  validate(cfg);
  QuadratureContext quad = build_context(cfg.panels, cfg.points_per_panel, cfg.beam.L);
  ModeBasis basis(cfg.n_modes, cfg.beam.L, quad);
  DiscreteOperators ops = assemble_cached(basis, quad, cfg.beam, tensor_cache);
  ModalForcing forcing(cfg.forcing, basis, quad);
  return Experiment{std::move(quad), std::move(basis), std::move(ops), std::move(forcing),
                    initial_state(cfg)};
}

json to_json(const SimulationSummary& s) {
  json doc;
  doc["records"] = s.records;
  doc["final"] = energy_json(s.final_energy);
  doc["max_identity_residual"] = s.max_identity_residual;
  doc["max_relative_energy_change"] = s.max_relative_energy_change;
  doc["blowup"] = s.blowup;
  doc["blowup_time"] = s.blowup ? json(s.blowup_time) : json(nullptr);
  doc["blowup_reason"] = s.blowup ? json(s.blowup_reason) : json(nullptr);
  doc["snapshots"] = s.snapshots;
  doc["max_inextensibility_residual"] = s.max_inext_residual;
  doc["max_inextensibility_deviation"] = s.max_inext_deviation;
  doc["wall_seconds"] = s.wall_seconds;
  return doc;
}

SimulationSummary summarize(const Trajectory& trajectory) {
  SimulationSummary s;
  s.records = trajectory.records.size();
  if (!trajectory.records.empty()) {
    s.final_energy = trajectory.records.back().energy;
    const double e0 = trajectory.records.front().energy.total;
    for (const auto& r : trajectory.records) {
      s.max_identity_residual = std::max(s.max_identity_residual, std::abs(r.energy.identity_residual));
      if (e0 > 0.0)
        s.max_relative_energy_change =
            std::max(s.max_relative_energy_change, std::abs(r.energy.total - e0) / e0);
    }
  }
  if (trajectory.blowup) {
    s.blowup = true;
    s.blowup_time = trajectory.blowup->t;
    s.blowup_reason = trajectory.blowup->reason;
  }
  return s;
}

SimulationSummary simulate_to_directory(const SimulationConfig& cfg, const fs::path& out_dir,
                                        const std::optional<fs::path>& tensor_cache,
                                        Trajectory* trajectory_out) {
  const auto start = std::chrono::steady_clock::now();
  validate(cfg);
  std::error_code ec;
  fs::create_directories(out_dir / "snapshots", ec);
  if (ec) throw InputError("cannot create output directory " + out_dir.string() + ": " + ec.message());
  // Written first so an unwritable directory fails before any computation.
  write_json(out_dir / "resolved_config.json", to_json(cfg));

  const Experiment exp = prepare_experiment(cfg, tensor_cache);
  Trajectory traj =
      run_simulation(exp.ops, exp.initial, exp.load(), cfg.integrator, cfg.t_final, cfg.record_every);
  write_trajectory_csv(out_dir / "trajectory.csv", traj);

  SimulationSummary summary = summarize(traj);
  const auto grid = uniform_grid(cfg.beam.L, cfg.snapshot_points);
  const LoadFunction load = exp.load();
  const std::size_t count = traj.records.size();
  for (std::size_t k = 0; k < count; ++k) {
    const bool keep = k == 0 || k + 1 == count ||
                      (cfg.snapshot_every > 0 && k % static_cast<std::size_t>(cfg.snapshot_every) == 0);
    if (!keep) continue;
    const ModalState& state = traj.records[k].state;
    if (!state.finite()) continue;
    std::optional<Eigen::VectorXd> accel;
    try {
      const Eigen::VectorXd p = load ? load(state.t) : Eigen::VectorXd();
      accel = solve_acceleration(exp.ops, state, p);
    } catch (const NumericalError&) {
      // a blown-up final state may have a singular mass matrix; keep the kinematic fields
    }
    const FieldSnapshot snap =
        reconstruct(exp.basis, exp.quad, state, accel, grid,
                    accel ? FieldRequest::with_acceleration : FieldRequest::kinematic);
    write_snapshot_csv(out_dir / "snapshots" / (numbered("snapshot_", static_cast<int>(k), 6) + ".csv"),
                       snap);
    const InextensibilityReport inext = inextensibility_residual(exp.basis, exp.quad, state);
    summary.max_inext_residual = std::max(summary.max_inext_residual, inext.algebraic_residual);
    for (double d : snap.inext_deviation)
      summary.max_inext_deviation = std::max(summary.max_inext_deviation, d);
    ++summary.snapshots;
  }

  summary.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_json(out_dir / "summary.json", to_json(summary));
  if (trajectory_out) *trajectory_out = std::move(traj);
  return summary;
}

std::vector<SweepRow> run_sweep(const json& base, const std::string& param,
                                const std::vector<double>& values, const fs::path& out_dir,
                                const std::optional<fs::path>& tensor_cache, int threads) {
  if (values.empty()) throw InputError("sweep: the value list is empty");
  if (threads < 1) throw InputError("sweep: --threads must be >= 1");

  // A bad parameter path fails before any run starts; invalid values only fail their own run.
  {
    json probe = base;
    set_scalar(probe, param, values.front());
  }
  fs::create_directories(out_dir);

  std::vector<SweepRow> rows(values.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t k = next++; k < values.size(); k = next++) {
      SweepRow& row = rows[k];
      row.index = static_cast<int>(k);
      row.value = values[k];
      try {
        json doc = base;
        set_scalar(doc, param, values[k]);
        const SimulationConfig cfg = parse_config(doc);
        Trajectory traj;
        row.summary = simulate_to_directory(cfg, out_dir / numbered("run_", static_cast<int>(k), 3),
                                            tensor_cache, &traj);
        row.status = row.summary.blowup ? "blowup" : "completed";
        if (!traj.records.empty() && !row.summary.blowup) {
          const double e0 = traj.records.front().energy.total;
          const double floor = std::max(e0 * 1e-12, 1e-300);
          try {
            row.decay = fit_decay_rate(traj, traj.records.front().state.t,
                                       traj.records.back().state.t, floor);
          } catch (const InputError& e) {
            row.message = std::string("decay fit skipped: ") + e.what();
          }
        }
      } catch (const std::exception& e) {
        row.status = "error";
        row.message = e.what();
      }
    }
  };
  const int pool = std::min<int>(threads, static_cast<int>(values.size()));
  std::vector<std::thread> workers;
  for (int i = 1; i < pool; ++i) workers.emplace_back(worker);
  worker();
  for (auto& w : workers) w.join();

  write_sweep_index(out_dir / "index.csv", param, rows);
  return rows;
}

void write_sweep_index(const fs::path& path, const std::string& param,
                       const std::vector<SweepRow>& rows) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << "run,param,value,status,blowup_time,final_E_total,max_identity_residual,omega,M,r2,message\n";
  auto quoted = [](std::string s) {
    std::string q = "\"";
    for (char c : s) q += (c == '"') ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  };
  for (const auto& r : rows) {
    const bool ran = r.status != "error";
    out << numbered("run_", r.index, 3) << ',' << param << ',' << format_double(r.value) << ','
        << r.status << ',' << (r.summary.blowup ? format_double(r.summary.blowup_time) : "") << ','
        << (ran ? format_double(r.summary.final_energy.total) : "") << ','
        << (ran ? format_double(r.summary.max_identity_residual) : "") << ','
        << (r.decay ? format_double(r.decay->omega) : "") << ','
        << (r.decay ? format_double(r.decay->M) : "") << ','
        << (r.decay ? format_double(r.decay->r2) : "") << ',' << quoted(r.message) << '\n';
  }
}

ConvergenceMetric convergence_metric_from_string(const std::string& name) {
  if (name == "identity") return ConvergenceMetric::identity;
  if (name == "energy-drift") return ConvergenceMetric::energy_drift;
  if (name == "final-state") return ConvergenceMetric::final_state;
  throw InputError("unknown convergence metric '" + name +
                   "' (expected identity, energy-drift or final-state)");
}

std::vector<std::pair<double, double>> convergence_points(const std::vector<fs::path>& files,
                                                          ConvergenceMetric metric,
                                                          const std::vector<double>& dts) {
  if (!dts.empty() && dts.size() != files.size())
    throw InputError("converge: give one --dt per trajectory file");
  std::vector<CsvTable> tables;
  std::vector<double> steps;
  for (std::size_t k = 0; k < files.size(); ++k) {
    tables.push_back(read_csv(files[k]));
    if (!dts.empty()) {
      steps.push_back(dts[k]);
    } else {
      // record_every must be 1 for this inference to give the step size
      const auto t = tables.back().column("t");
      if (t.size() < 2) throw InputError(files[k].string() + ": need two rows to infer dt");
      steps.push_back(t[1] - t[0]);
    }
  }

  std::vector<std::pair<double, double>> points;
  if (metric == ConvergenceMetric::final_state) {
    for (std::size_t k = 0; k + 1 < tables.size(); ++k) {
      double diff = 0.0;
      for (std::size_t c = 0; c < tables[k].header.size(); ++c) {
        const std::string& name = tables[k].header[c];
        if (name.rfind("q_", 0) != 0) continue;
        const auto a = tables[k].column(name);
        const auto b = tables[k + 1].column(name);
        diff = std::max(diff, std::abs(a.back() - b.back()));
      }
      points.emplace_back(steps[k], diff);
    }
    return points;
  }
  for (std::size_t k = 0; k < tables.size(); ++k) {
    double err = 0.0;
    if (metric == ConvergenceMetric::identity) {
      for (double r : tables[k].column("identity_residual")) err = std::max(err, std::abs(r));
    } else {
      const auto e = tables[k].column("E_total");
      if (e.empty() || !(e.front() > 0.0))
        throw InputError(files[k].string() + ": energy drift needs E_total(0) > 0");
      for (double v : e) err = std::max(err, std::abs(v - e.front()) / e.front());
    }
    points.emplace_back(steps[k], err);
  }
  return points;
}

}  // namespace cantilever
