#pragma once

#include <fstream>
#include <string>

#include <Eigen/Dense>

#include "sharpspec/core/report.hpp"
#include "sharpspec/cubical/complex.hpp"
#include "sharpspec/io/csv.hpp"

namespace sharpspec::io {

namespace detail {

inline void vtk_header(std::ostream& out, const cubical::CubicalComplex& c, const std::string& title, int extra) {
  const auto& lo = c.domain().lo();
  const auto& hi = c.domain().hi();
  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET STRUCTURED_POINTS\n";
  out << "DIMENSIONS";
  for (int a = 0; a < 3; ++a) out << ' ' << (a < c.dim() ? hi[a] - lo[a] + extra : 1);
  out << "\nORIGIN";
  for (int a = 0; a < 3; ++a) out << ' ' << format_real(a < c.dim() ? lo[a] * c.h() : 0.0);
  out << "\nSPACING";
  for (int a = 0; a < 3; ++a) out << ' ' << format_real(c.h());
  out << '\n';
}

}  // namespace detail

// Edge cochain of a 3D complex as a cell-centred vector field: each voxel of
// the bounding box gets the mean of its four parallel edges per axis, over h.
inline void write_vtk_edge_field(const std::string& path, const cubical::CubicalComplex& c, const Eigen::VectorXd& x,
                                 const std::string& title) {
  require(c.dim() == 3 && x.size() == c.count(1), ErrorKind::dimension_mismatch, "vtk: expected a 3D edge field");
  const auto& lo = c.domain().lo();
  const auto& hi = c.domain().hi();
  std::ofstream out = open_output(path);
  detail::vtk_header(out, c, title, 1);
  const long cells = static_cast<long>(hi[0] - lo[0]) * (hi[1] - lo[1]) * (hi[2] - lo[2]);
  out << "CELL_DATA " << cells << "\nVECTORS field double\n";
  for (int k = lo[2]; k < hi[2]; ++k)
    for (int j = lo[1]; j < hi[1]; ++j)
      for (int i = lo[0]; i < hi[0]; ++i) {
        Eigen::Vector3d v = Eigen::Vector3d::Zero();
        if (c.domain().contains({i, j, k}))
          for (int a = 0; a < 3; ++a) {
            const int b = (a + 1) % 3, e = (a + 2) % 3;
            for (int s = 0; s < 4; ++s) {
              cubical::CubeCell edge{1u << a, {i, j, k}};
              edge.anchor[b] += s & 1;
              edge.anchor[e] += s >> 1;
              Eigen::Index idx = c.index_of(edge);
              if (idx >= 0) v(a) += x(idx);
            }
            v(a) /= 4.0 * c.h();
          }
        out << format_real(v(0)) << ' ' << format_real(v(1)) << ' ' << format_real(v(2)) << '\n';
      }
  out << "SCALARS inside int 1\nLOOKUP_TABLE default\n";
  for (int k = lo[2]; k < hi[2]; ++k)
    for (int j = lo[1]; j < hi[1]; ++j)
      for (int i = lo[0]; i < hi[0]; ++i) out << (c.domain().contains({i, j, k}) ? 1 : 0) << '\n';
}

// Vertex cochain of a 1D or 2D complex as point data; vertices outside the
// complex are written as 0.
inline void write_vtk_node_field(const std::string& path, const cubical::CubicalComplex& c, const Eigen::VectorXd& u,
                                 const std::string& title) {
  require(c.dim() <= 2 && u.size() == c.count(0), ErrorKind::dimension_mismatch, "vtk: expected a 1D/2D node field");
  const auto& lo = c.domain().lo();
  const auto& hi = c.domain().hi();
  std::ofstream out = open_output(path);
  detail::vtk_header(out, c, title, 1);
  const int nx = hi[0] - lo[0] + 1, ny = c.dim() == 2 ? hi[1] - lo[1] + 1 : 1;
  out << "POINT_DATA " << static_cast<long>(nx) * ny << "\nSCALARS field double 1\nLOOKUP_TABLE default\n";
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      cubical::CubeCell v{0u, {lo[0] + i, c.dim() == 2 ? lo[1] + j : 0, 0}};
      Eigen::Index idx = c.index_of(v);
      out << format_real(idx >= 0 ? u(idx) : 0.0) << '\n';
    }
}

}  // namespace sharpspec::io
