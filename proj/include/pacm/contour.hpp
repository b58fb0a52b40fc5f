#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "pacm/grid.hpp"

namespace pacm {

/// ParaView-style cell-to-point conversion: each node takes the mean of its
/// adjacent cells (4 interior, 2 edge, 1 corner).
Eigen::VectorXd cell_to_point(const Grid& g, const Eigen::VectorXd& cell_field);

/// Closed iso-contour polylines (first point repeated at the end).
struct ContourSet {
  std::vector<std::vector<Eigen::Vector2d>> loops;
  double threshold = 0.85;
};

/// Marching squares at `threshold` on the node-averaged density field.
/// The field is padded with a one-cell void margin so solid regions touching
/// the domain boundary still produce closed loops; loops are oriented with
/// solid on the left of the travel direction. Saddle cells are resolved by
/// the cell-average rule.
ContourSet extract_contour(const Grid& g, const Eigen::VectorXd& cell_field, double threshold);

/// Plain-text polylines: "x y" per vertex, blank line between loops.
void write_polylines(const ContourSet& cs, const std::string& path);

/// Minimal DXF POLYLINE export.
void write_dxf(const ContourSet& cs, const std::string& path);

}  // namespace pacm
