#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

#include "pacm/core.hpp"

namespace pacm {

/// Structured grid of bilinear quadrilateral elements on [0,lx] x [0,ly].
/// Node and element ids are row-major with x running fastest; element
/// connectivity lists the four corner nodes counter-clockwise starting at
/// the lower-left corner.
struct Grid {
  int nex = 0, ney = 0;
  double lx = 0.0, ly = 0.0;
  double thickness = 0.0;
  double dx = 0.0, dy = 0.0;

  Eigen::VectorXd node_x, node_y;
  std::vector<std::array<int, 4>> conn;

  // DOF maps. Canonical numbering is pressure_dof[n] = n and
  // disp_dof[2n+c] = 2n+c; kept explicit so renumbered grids stay valid.
  std::vector<int> pressure_dof;
  std::vector<int> disp_dof;

  int num_nodes() const { return static_cast<int>(node_x.size()); }
  int num_elems() const { return static_cast<int>(conn.size()); }
  int num_pressure_dofs() const { return num_nodes(); }
  int num_disp_dofs() const { return 2 * num_nodes(); }

  int node_id(int ix, int iy) const { return iy * (nex + 1) + ix; }
  int elem_id(int ix, int iy) const { return iy * nex + ix; }

  int pdof(int node) const { return pressure_dof[node]; }
  int udof(int node, int comp) const { return disp_dof[2 * node + comp]; }

  Eigen::Vector2d elem_center(int e) const {
    const auto& c = conn[e];
    return {0.25 * (node_x[c[0]] + node_x[c[1]] + node_x[c[2]] + node_x[c[3]]),
            0.25 * (node_y[c[0]] + node_y[c[1]] + node_y[c[2]] + node_y[c[3]])};
  }

  double elem_area(int e) const;  // signed shoelace area (> 0 for valid CCW)
  double min_elem_size() const { return std::min(dx, dy); }

  /// Node nearest a physical point.
  int nearest_node(double x, double y) const;
};

/// Build a uniform grid. Throws ConfigError for non-positive inputs.
Grid build_grid(int nex, int ney, double lx, double ly, double thickness);

/// Jacobian determinant of element e at a reference point (xi, eta).
double jacobian_det(const Grid& g, int e, double xi, double eta);

}  // namespace pacm
