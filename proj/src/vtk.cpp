#include "pacm/vtk.hpp"

#include <cstdio>
#include <fstream>

#include "pacm/core.hpp"

namespace pacm {

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("vtk: cannot write '" + path + "'");
  return out;
}

void write_cell_scalars(std::ofstream& out, const std::map<std::string, Eigen::VectorXd>& fields,
                        Eigen::Index n) {
  if (fields.empty()) return;
  out << "CELL_DATA " << n << "\n";
  for (const auto& [name, v] : fields) {
    if (v.size() != n) throw IoError("vtk: cell field '" + name + "' has wrong size");
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (Eigen::Index i = 0; i < n; ++i) out << fmt(v[i]) << "\n";
  }
}

void write_point_fields(std::ofstream& out, const VtkFields& f, Eigen::Index n) {
  if (f.point_scalars.empty() && f.point_vectors.empty()) return;
  out << "POINT_DATA " << n << "\n";
  for (const auto& [name, v] : f.point_scalars) {
    if (v.size() != n) throw IoError("vtk: point field '" + name + "' has wrong size");
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (Eigen::Index i = 0; i < n; ++i) out << fmt(v[i]) << "\n";
  }
  for (const auto& [name, v] : f.point_vectors) {
    if (v.size() != 2 * n) throw IoError("vtk: point vector '" + name + "' has wrong size");
    out << "VECTORS " << name << " double\n";
    for (Eigen::Index i = 0; i < n; ++i)
      out << fmt(v[2 * i]) << " " << fmt(v[2 * i + 1]) << " 0\n";
  }
}

}  // namespace

void write_vtk_structured(const Grid& g, const VtkFields& fields, const std::string& path) {
  auto out = open_out(path);
  out << "# vtk DataFile Version 3.0\npacm fields\nASCII\n";
  out << "DATASET STRUCTURED_GRID\n";
  out << "DIMENSIONS " << g.nex + 1 << " " << g.ney + 1 << " 1\n";
  out << "POINTS " << g.num_nodes() << " double\n";
  for (int n = 0; n < g.num_nodes(); ++n)
    out << fmt(g.node_x[n]) << " " << fmt(g.node_y[n]) << " 0\n";
  write_cell_scalars(out, fields.cell_scalars, g.num_elems());
  write_point_fields(out, fields, g.num_nodes());
  if (!out) throw IoError("vtk: write failed for '" + path + "'");
}

void write_vtk_unstructured(const std::vector<double>& xs, const std::vector<double>& ys,
                            const std::vector<std::array<int, 4>>& conn, const VtkFields& fields,
                            const std::string& path, double displacement_scale) {
  auto out = open_out(path);
  const auto n = static_cast<Eigen::Index>(xs.size());
  out << "# vtk DataFile Version 3.0\npacm mesh\nASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << n << " double\n";
  const Eigen::VectorXd* disp = nullptr;
  if (displacement_scale != 0.0) {
    const auto it = fields.point_vectors.find("displacement");
    if (it != fields.point_vectors.end()) disp = &it->second;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    double x = xs[i], y = ys[i];
    if (disp) {
      x += displacement_scale * (*disp)[2 * i];
      y += displacement_scale * (*disp)[2 * i + 1];
    }
    out << fmt(x) << " " << fmt(y) << " 0\n";
  }
  out << "CELLS " << conn.size() << " " << conn.size() * 5 << "\n";
  for (const auto& c : conn) out << "4 " << c[0] << " " << c[1] << " " << c[2] << " " << c[3] << "\n";
  out << "CELL_TYPES " << conn.size() << "\n";
  for (size_t i = 0; i < conn.size(); ++i) out << "9\n";  // VTK_QUAD
  write_cell_scalars(out, fields.cell_scalars, static_cast<Eigen::Index>(conn.size()));
  write_point_fields(out, fields, n);
  if (!out) throw IoError("vtk: write failed for '" + path + "'");
}

}  // namespace pacm
