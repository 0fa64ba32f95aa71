#include "sbe/io.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace sbe {

namespace {
std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace

void write_psi_csv(std::ostream& os, const GridFunction& f) {
  const Grid& g = f.grid();
  for (int d = 0; d < g.dim(); ++d) os << (d ? "," : "") << "x" << (d + 1);
  os << ",value\n";
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (int d = 0; d < g.dim(); ++d) os << fmt17(g.coord(i, d)) << ',';
    os << fmt17(f[i]) << "\n";
  }
}

GridFunction read_psi_csv(std::istream& is, GridPtr grid) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("psi csv: empty file");
  std::vector<double> values;
  values.reserve(grid->size());
  std::size_t row = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (row >= grid->size()) throw std::runtime_error("psi csv: too many rows");
    std::stringstream ss(line);
    std::string cell;
    for (int d = 0; d < grid->dim(); ++d) {
      if (!std::getline(ss, cell, ',')) throw std::runtime_error("psi csv: short row");
      double c = std::strtod(cell.c_str(), nullptr);
      if (std::fabs(c - grid->coord(row, d)) > 1e-9)
        throw std::runtime_error("psi csv: node coordinates do not match the grid at row " +
                                 std::to_string(row + 1));
    }
    if (!std::getline(ss, cell, ',')) throw std::runtime_error("psi csv: missing value");
    values.push_back(std::strtod(cell.c_str(), nullptr));
    ++row;
  }
  if (values.size() != grid->size())
    throw std::runtime_error("psi csv: row count does not match the grid");
  return GridFunction(std::move(grid), std::move(values));
}

}  // namespace sbe
