#include "pacm/grid.hpp"

#include <cmath>
#include <limits>

namespace pacm {

Grid build_grid(int nex, int ney, double lx, double ly, double thickness) {
  if (nex <= 0 || ney <= 0)
    throw ConfigError("build_grid: element counts must be positive");
  if (lx <= 0.0 || ly <= 0.0 || thickness <= 0.0)
    throw ConfigError("build_grid: domain dimensions must be positive");

  Grid g;
  g.nex = nex;
  g.ney = ney;
  g.lx = lx;
  g.ly = ly;
  g.thickness = thickness;
  g.dx = lx / nex;
  g.dy = ly / ney;

  const int nnode = (nex + 1) * (ney + 1);
  g.node_x.resize(nnode);
  g.node_y.resize(nnode);
  for (int iy = 0; iy <= ney; ++iy) {
    for (int ix = 0; ix <= nex; ++ix) {
      const int n = g.node_id(ix, iy);
      g.node_x[n] = ix * g.dx;
      g.node_y[n] = iy * g.dy;
    }
  }

  g.conn.reserve(static_cast<size_t>(nex) * ney);
  for (int iy = 0; iy < ney; ++iy) {
    for (int ix = 0; ix < nex; ++ix) {
      g.conn.push_back({g.node_id(ix, iy), g.node_id(ix + 1, iy),
                        g.node_id(ix + 1, iy + 1), g.node_id(ix, iy + 1)});
    }
  }

  g.pressure_dof.resize(nnode);
  g.disp_dof.resize(2 * nnode);
  for (int n = 0; n < nnode; ++n) {
    g.pressure_dof[n] = n;
    g.disp_dof[2 * n] = 2 * n;
    g.disp_dof[2 * n + 1] = 2 * n + 1;
  }
  return g;
}

double Grid::elem_area(int e) const {
  const auto& c = conn[e];
  double a = 0.0;
  for (int k = 0; k < 4; ++k) {
    const int i = c[k], j = c[(k + 1) % 4];
    a += node_x[i] * node_y[j] - node_x[j] * node_y[i];
  }
  return 0.5 * a;
}

int Grid::nearest_node(double x, double y) const {
  int best = 0;
  double best_d = std::numeric_limits<double>::max();
  for (int n = 0; n < num_nodes(); ++n) {
    const double d = (node_x[n] - x) * (node_x[n] - x) + (node_y[n] - y) * (node_y[n] - y);
    if (d < best_d) {
      best_d = d;
      best = n;
    }
  }
  return best;
}

double jacobian_det(const Grid& g, int e, double xi, double eta) {
  const auto& c = g.conn[e];
  // dN/dxi, dN/deta for the bilinear quad.
  const double dndxi[4] = {-0.25 * (1 - eta), 0.25 * (1 - eta), 0.25 * (1 + eta), -0.25 * (1 + eta)};
  const double dndeta[4] = {-0.25 * (1 - xi), -0.25 * (1 + xi), 0.25 * (1 + xi), 0.25 * (1 - xi)};
  double j11 = 0, j12 = 0, j21 = 0, j22 = 0;
  for (int a = 0; a < 4; ++a) {
    j11 += dndxi[a] * g.node_x[c[a]];
    j12 += dndxi[a] * g.node_y[c[a]];
    j21 += dndeta[a] * g.node_x[c[a]];
    j22 += dndeta[a] * g.node_y[c[a]];
  }
  return j11 * j22 - j12 * j21;
}

}  // namespace pacm
