#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "cantilever/field_reconstruction.hpp"
#include "cantilever/mode_basis.hpp"
#include "cantilever/trajectory.hpp"

namespace cantilever {

/// Shortest decimal text that reads back to the same double.
std::string format_double(double value);

std::vector<std::string> trajectory_header(int n_modes);
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& trajectory);

void write_snapshot_csv(const std::filesystem::path& path, const FieldSnapshot& snapshot);

/// Columns n, kappa, kappaL, c, C, residual.
void write_modes_csv(std::ostream& out, const ModeBasis& basis);

/// Numeric CSV with a header row.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Throws InputError if the column is absent.
  std::vector<double> column(const std::string& name) const;
  bool has_column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

}  // namespace cantilever
