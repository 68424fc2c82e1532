#pragma once

#include <string>

#include "kirchhoff/evolution.hpp"
#include "kirchhoff/mesh.hpp"

namespace kirchhoff {

/// Scientific notation with 17 significant digits: round-trip exact for doubles
/// and stable across runs, which keeps emitted CSVs byte-reproducible.
std::string format_float(double x);

/// Columns: t,L2sq,H1sq,Lq1,J,I,H,D — one row per recorded step.
void write_trajectory_csv(const std::string& path, const Trajectory& traj);

/// 1D: x,u. 2D: x,y,u. Interior nodes only (boundary is identically zero).
void write_field_csv(const std::string& path, const Field& u);

/// Reads a field CSV back onto the given mesh (value = last column).
Field read_field_csv(const std::string& path, const Mesh& m);

void write_text_file(const std::string& path, const std::string& content);

} // namespace kirchhoff
