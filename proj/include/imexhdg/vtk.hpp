#pragma once

#include <array>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <string>

#include "imexhdg/errors.hpp"
#include "imexhdg/fields.hpp"
#include "imexhdg/swe_model.hpp"

namespace imexhdg {

/// Locale-independent formatting: shortest round-trip form, or a fixed number
/// of significant digits when `digits` > 0.
inline std::string format_double(double v, int digits = 0) {
  std::array<char, 64> buf{};
  auto res = digits > 0 ? std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, digits)
                        : std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

/// Legacy ASCII VTK unstructured grid: every GLL node is a point, each element
/// is split into p^2 VTK_QUAD cells; point data phi_prime and velocity.
inline void write_vtk(const Discretization &disc, const StateField &q, const ModelParams &params,
                      const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw io_error("cannot write VTK file '" + path.string() + "'");
  const auto &basis = disc.basis();
  const int p = basis.order();
  const int npe = basis.num_nodes();
  const long npts = long(disc.num_elements()) * npe;
  const long ncells = long(disc.num_elements()) * p * p;
  auto num = [](double v) { return format_double(v, 17); };

  out << "# vtk DataFile Version 3.0\n";
  out << "imexhdg shallow water state\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << npts << " double\n";
  for (int e = 0; e < disc.num_elements(); ++e)
    for (int k = 0; k < npe; ++k) {
      const auto &pt = disc.coord(e, k);
      out << num(pt.x) << ' ' << num(pt.y) << " 0\n";
    }
  out << "CELLS " << ncells << ' ' << ncells * 5 << '\n';
  for (int e = 0; e < disc.num_elements(); ++e) {
    const long base = long(e) * npe;
    for (int j = 0; j < p; ++j)
      for (int i = 0; i < p; ++i)
        out << "4 " << base + basis.node(i, j) << ' ' << base + basis.node(i + 1, j) << ' '
            << base + basis.node(i + 1, j + 1) << ' ' << base + basis.node(i, j + 1) << '\n';
  }
  out << "CELL_TYPES " << ncells << '\n';
  for (long c = 0; c < ncells; ++c)
    out << "9\n";
  out << "POINT_DATA " << npts << '\n';
  out << "SCALARS phi_prime double 1\n";
  out << "LOOKUP_TABLE default\n";
  for (int e = 0; e < disc.num_elements(); ++e)
    for (int k = 0; k < npe; ++k)
      out << num(q(e, k, var_phi)) << '\n';
  out << "VECTORS velocity double\n";
  for (int e = 0; e < disc.num_elements(); ++e)
    for (int k = 0; k < npe; ++k) {
      const double phi = total_geopotential(q.at(e, k), params);
      out << num(q(e, k, var_u) / phi) << ' ' << num(q(e, k, var_v) / phi) << " 0\n";
    }
  if (!out)
    throw io_error("failed while writing VTK file '" + path.string() + "'");
}

} // namespace imexhdg
