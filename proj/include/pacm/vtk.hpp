#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "pacm/grid.hpp"

namespace pacm {

/// Legacy-ASCII VTK export of the structured grid. Cell fields carry one
/// value per element; point scalar fields one per node; point vector fields
/// two values per node (z written as 0).
struct VtkFields {
  std::map<std::string, Eigen::VectorXd> cell_scalars;
  std::map<std::string, Eigen::VectorXd> point_scalars;
  std::map<std::string, Eigen::VectorXd> point_vectors;  // interleaved x,y
};

void write_vtk_structured(const Grid& g, const VtkFields& fields, const std::string& path);

/// Unstructured quad mesh export (used for extracted/deformed geometry).
/// `displacement_scale` magnifies the written point coordinates when a
/// "displacement" vector field is present.
void write_vtk_unstructured(const std::vector<double>& xs, const std::vector<double>& ys,
                            const std::vector<std::array<int, 4>>& conn, const VtkFields& fields,
                            const std::string& path, double displacement_scale = 0.0);

}  // namespace pacm
