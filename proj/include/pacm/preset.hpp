#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pacm/grid.hpp"

namespace pacm {

enum class PresetKind { Inverter, Gripper, Contractor };
enum class EdgeId { Left, Right, Bottom, Top };

std::string to_string(PresetKind k);
PresetKind preset_kind_from_string(const std::string& s);

/// Axis-aligned rectangle in physical coordinates, used to mark passive
/// element regions. An element belongs if its centroid lies inside; the
/// interval is half-open with a snap tolerance so rect borders falling
/// exactly on centroid lines resolve consistently across mesh sizes.
struct Rect {
  double x0, y0, x1, y1;
  bool contains(double x, double y) const {
    const double ex = 1e-9 * (x1 - x0), ey = 1e-9 * (y1 - y0);
    return x >= x0 - ex && x < x1 - ex && y >= y0 - ey && y < y1 - ey;
  }
};

/// Optional overrides for the built-in problem presets. Fields left unset
/// keep the preset defaults. Clamp extents are configurable because Fig.-style
/// drawings pin them only graphically.
struct PresetOptions {
  int clamp_elems = 2;                  // clamp patch length in elements
  double p_in = 1e5;                    // N/m^2
  double spring_stiffness = 1e4;        // N/m
  double dummy_load = 1.0;              // N (magnitude; sign from output_dir)
  std::optional<std::pair<double, double>> output_point;  // physical coords
  std::optional<int> output_comp;       // 0 = x, 1 = y
  std::optional<double> output_dir;     // +1 / -1
  std::optional<std::vector<Rect>> passive_solid;
  std::optional<std::vector<Rect>> passive_void;
};

/// Boundary conditions, passive regions, output spring and dummy load for
/// one problem. Node/element ids refer to the grid the preset was built for.
struct Preset {
  PresetKind kind = PresetKind::Inverter;

  std::vector<int> pressure_input_nodes;  // Dirichlet p = p_in
  std::vector<int> pressure_zero_nodes;   // Dirichlet p = 0
  double p_in = 1e5;

  std::vector<int> fixed_dofs;  // clamps plus symmetry rollers
  std::vector<int> passive_solid_elems;
  std::vector<int> passive_void_elems;

  EdgeId symmetry_edge = EdgeId::Bottom;
  std::vector<EdgeId> input_edges;  // domain edges carrying the inlet

  int output_node = -1;
  int output_comp = 0;
  double output_dir = -1.0;
  double spring_stiffness = 1e4;
  double dummy_load = 1.0;

  int output_dof(const Grid& g) const { return g.udof(output_node, output_comp); }
};

/// Mesh with attached preset data; the spec's "annotated mesh".
struct Problem {
  Grid grid;
  Preset preset;
};

Preset make_preset(const Grid& g, PresetKind kind, const PresetOptions& opt = {});

/// Validates id ranges and the preset invariants (disjoint pressure sets,
/// output DOF not fixed, disjoint passive sets). Throws ConfigError.
void validate_preset(const Grid& g, const Preset& p);

Problem apply_preset(Grid grid, Preset preset);

/// Nodes on a domain edge of the canonical grid.
std::vector<int> edge_nodes(const Grid& g, EdgeId e);

/// Elements whose centroid lies in any of the rectangles.
std::vector<int> elems_in_rects(const Grid& g, const std::vector<Rect>& rects);

}  // namespace pacm
