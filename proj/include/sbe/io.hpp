#pragma once

#include <iosfwd>

#include "sbe/grid.hpp"

namespace sbe {

/// Node table "x1[,x2,...],value" with 17 significant digits (lossless
/// round-trip). Rows follow flat node order.
void write_psi_csv(std::ostream& os, const GridFunction& f);

/// Reads a node table written by write_psi_csv; validates that coordinates
/// match the grid nodes within 1e-9.
GridFunction read_psi_csv(std::istream& is, GridPtr grid);

}  // namespace sbe
