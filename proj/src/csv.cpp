#include "cantilever/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "cantilever/error.hpp"

namespace cantilever {

std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::vector<std::string> trajectory_header(int n_modes) {
  std::vector<std::string> h{"t"};
  for (int j = 1; j <= n_modes; ++j) h.push_back("q_" + std::to_string(j));
  for (int j = 1; j <= n_modes; ++j) h.push_back("v_" + std::to_string(j));
  for (const char* name : {"E_kinetic", "E_inertial", "E_bend", "E_nl", "E_total",
                           "dissipation_accum", "work_accum", "identity_residual"})
    h.emplace_back(name);
  return h;
}

namespace {

void write_row(std::ostream& out, const std::vector<double>& row) {
  for (std::size_t k = 0; k < row.size(); ++k) {
    if (k) out << ',';
    out << format_double(row[k]);
  }
  out << '\n';
}

void write_header(std::ostream& out, const std::vector<std::string>& header) {
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (k) out << ',';
    out << header[k];
  }
  out << '\n';
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  return out;
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
  const int n = trajectory.records.empty()
                    ? 0
                    : static_cast<int>(trajectory.records.front().state.q.size());
  write_header(out, trajectory_header(n));
  std::vector<double> row;
  for (const auto& rec : trajectory.records) {
    row.clear();
    row.push_back(rec.state.t);
    for (int j = 0; j < n; ++j) row.push_back(rec.state.q[j]);
    for (int j = 0; j < n; ++j) row.push_back(rec.state.v[j]);
    const auto& e = rec.energy;
    row.insert(row.end(), {e.kinetic, e.inertial, e.bend, e.nonlinear, e.total,
                           e.dissipation_accum, e.work_accum, e.identity_residual});
    write_row(out, row);
  }
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& trajectory) {
  auto out = open_out(path);
  write_trajectory_csv(out, trajectory);
}

void write_snapshot_csv(const std::filesystem::path& path, const FieldSnapshot& s) {
  auto out = open_out(path);
  write_header(out, {"x", "w", "w_x", "w_xx", "w_xxx", "w_xxxx", "u", "u_t", "u_tt",
                     "inext_deviation"});
  for (std::size_t k = 0; k < s.grid.size(); ++k) {
    const double u_tt = s.u_tt.empty() ? 0.0 : s.u_tt[k];
    write_row(out, {s.grid[k], s.w[k], s.w_x[k], s.w_xx[k], s.w_xxx[k], s.w_xxxx[k], s.u[k],
                    s.u_t[k], u_tt, s.inext_deviation[k]});
  }
}

void write_modes_csv(std::ostream& out, const ModeBasis& basis) {
  write_header(out, {"n", "kappa", "kappaL", "c", "C", "residual"});
  for (int j = 0; j < basis.size(); ++j) {
    const double k = basis.wavenumber(j);
    const auto& s = basis.coefficients(j);
    out << (j + 1);
    for (double v : {k, k * basis.length(), s.c, s.C, characteristic_residual(k, basis.length())})
      out << ',' << format_double(v);
    out << '\n';
  }
}

bool CsvTable::has_column(const std::string& name) const {
  return std::find(header.begin(), header.end(), name) != header.end();
}

std::vector<double> CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw InputError("CSV has no column '" + name + "'");
  const auto idx = static_cast<std::size_t>(it - header.begin());
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.at(idx));
  return out;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw InputError(path.string() + ": empty CSV");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) table.header.push_back(cell);
  }
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      double v = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
        throw InputError(path.string() + ":" + std::to_string(line_no) + ": bad number '" + cell +
                         "'");
      }
      row.push_back(v);
    }
    if (row.size() != table.header.size())
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": wrong column count");
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace cantilever
