#include "pacm/preset.hpp"

#include <algorithm>
#include <set>

namespace pacm {

std::string to_string(PresetKind k) {
  switch (k) {
    case PresetKind::Inverter: return "inverter";
    case PresetKind::Gripper: return "gripper";
    case PresetKind::Contractor: return "contractor";
  }
  return "?";
}

PresetKind preset_kind_from_string(const std::string& s) {
  if (s == "inverter") return PresetKind::Inverter;
  if (s == "gripper") return PresetKind::Gripper;
  if (s == "contractor") return PresetKind::Contractor;
  throw ConfigError("unknown preset '" + s + "' (expected inverter|gripper|contractor)");
}

std::vector<int> edge_nodes(const Grid& g, EdgeId e) {
  std::vector<int> out;
  switch (e) {
    case EdgeId::Left:
      for (int iy = 0; iy <= g.ney; ++iy) out.push_back(g.node_id(0, iy));
      break;
    case EdgeId::Right:
      for (int iy = 0; iy <= g.ney; ++iy) out.push_back(g.node_id(g.nex, iy));
      break;
    case EdgeId::Bottom:
      for (int ix = 0; ix <= g.nex; ++ix) out.push_back(g.node_id(ix, 0));
      break;
    case EdgeId::Top:
      for (int ix = 0; ix <= g.nex; ++ix) out.push_back(g.node_id(ix, g.ney));
      break;
  }
  return out;
}

std::vector<int> elems_in_rects(const Grid& g, const std::vector<Rect>& rects) {
  std::vector<int> out;
  for (int e = 0; e < g.num_elems(); ++e) {
    const auto c = g.elem_center(e);
    for (const auto& r : rects) {
      if (r.contains(c.x(), c.y())) {
        out.push_back(e);
        break;
      }
    }
  }
  return out;
}

namespace {

// Clamp both displacement DOFs of `count+1` nodes along a vertical edge
// starting at row iy0 and stepping by diy.
void add_clamp_patch(const Grid& g, int ix, int iy0, int diy, int count, std::set<int>& dofs) {
  for (int k = 0; k <= count; ++k) {
    const int iy = iy0 + diy * k;
    const int n = g.node_id(ix, iy);
    dofs.insert(g.udof(n, 0));
    dofs.insert(g.udof(n, 1));
  }
}

}  // namespace

Preset make_preset(const Grid& g, PresetKind kind, const PresetOptions& opt) {
  Preset p;
  p.kind = kind;
  p.p_in = opt.p_in;
  p.spring_stiffness = opt.spring_stiffness;
  p.dummy_load = opt.dummy_load;
  p.symmetry_edge = EdgeId::Bottom;

  const double lx = g.lx, ly = g.ly;

  // Pressure Dirichlet sets. Corner nodes shared between an inlet edge and
  // a zero edge go to the inlet set; symmetry-edge interior nodes carry no
  // pressure data (natural zero flux).
  std::vector<EdgeId> in_edges, zero_edges;
  switch (kind) {
    case PresetKind::Inverter:
    case PresetKind::Gripper:
      in_edges = {EdgeId::Left};
      zero_edges = {EdgeId::Top, EdgeId::Right};
      break;
    case PresetKind::Contractor:
      in_edges = {EdgeId::Left, EdgeId::Right};
      zero_edges = {EdgeId::Top};
      break;
  }
  p.input_edges = in_edges;
  std::set<int> in_set, zero_set;
  for (EdgeId e : in_edges)
    for (int n : edge_nodes(g, e)) in_set.insert(n);
  for (EdgeId e : zero_edges)
    for (int n : edge_nodes(g, e))
      if (!in_set.count(n)) zero_set.insert(n);
  p.pressure_input_nodes.assign(in_set.begin(), in_set.end());
  p.pressure_zero_nodes.assign(zero_set.begin(), zero_set.end());

  // Structural supports.
  std::set<int> fixed;
  const int nc = std::min(opt.clamp_elems, g.ney);
  switch (kind) {
    case PresetKind::Inverter:
    case PresetKind::Gripper:
      add_clamp_patch(g, 0, 0, +1, nc, fixed);        // bottom-left corner patch
      add_clamp_patch(g, 0, g.ney, -1, nc, fixed);    // top-left corner patch
      break;
    case PresetKind::Contractor:
      add_clamp_patch(g, 0, 0, +1, nc, fixed);
      add_clamp_patch(g, 0, g.ney, -1, nc, fixed);
      add_clamp_patch(g, g.nex, 0, +1, nc, fixed);
      add_clamp_patch(g, g.nex, g.ney, -1, nc, fixed);
      break;
  }
  // Symmetry rollers: normal displacement fixed on the bottom edge.
  for (int n : edge_nodes(g, EdgeId::Bottom)) fixed.insert(g.udof(n, 1));
  p.fixed_dofs.assign(fixed.begin(), fixed.end());

  // Passive regions and the output port.
  std::vector<Rect> solid_rects, void_rects;
  double out_x = 0, out_y = 0;
  int out_comp = 0;
  switch (kind) {
    case PresetKind::Inverter:
      out_x = lx;
      out_y = 0.0;
      out_comp = 0;
      break;
    case PresetKind::Gripper: {
      const double w = lx / 5.0, s = lx / 40.0;
      void_rects.push_back({lx - w, 0.0, lx, w});
      solid_rects.push_back({lx - w, w, lx, w + s});
      out_x = lx - w;
      out_y = w;
      out_comp = 1;
      break;
    }
    case PresetKind::Contractor: {
      const double w = lx / 40.0, h = ly / 4.0;
      solid_rects.push_back({lx / 2 - w / 2, 0.0, lx / 2 + w / 2, h});
      out_x = lx / 2;
      out_y = 0.0;
      out_comp = 0;
      break;
    }
  }
  if (opt.passive_solid) solid_rects = *opt.passive_solid;
  if (opt.passive_void) void_rects = *opt.passive_void;
  p.passive_solid_elems = elems_in_rects(g, solid_rects);
  p.passive_void_elems = elems_in_rects(g, void_rects);

  if (opt.output_point) {
    out_x = opt.output_point->first;
    out_y = opt.output_point->second;
  }
  p.output_node = g.nearest_node(out_x, out_y);
  p.output_comp = opt.output_comp.value_or(out_comp);
  p.output_dir = opt.output_dir.value_or(-1.0);

  return p;
}

void validate_preset(const Grid& g, const Preset& p) {
  const int nn = g.num_nodes(), ne = g.num_elems();
  auto check_nodes = [&](const std::vector<int>& v, const char* what) {
    for (int n : v)
      if (n < 0 || n >= nn) throw ConfigError(std::string("preset: ") + what + " node id out of range");
  };
  auto check_elems = [&](const std::vector<int>& v, const char* what) {
    for (int e : v)
      if (e < 0 || e >= ne) throw ConfigError(std::string("preset: ") + what + " element id out of range");
  };
  check_nodes(p.pressure_input_nodes, "pressure input");
  check_nodes(p.pressure_zero_nodes, "zero pressure");
  check_elems(p.passive_solid_elems, "passive solid");
  check_elems(p.passive_void_elems, "passive void");
  for (int d : p.fixed_dofs)
    if (d < 0 || d >= g.num_disp_dofs()) throw ConfigError("preset: fixed DOF out of range");
  if (p.output_node < 0 || p.output_node >= nn) throw ConfigError("preset: output node out of range");
  if (p.output_comp != 0 && p.output_comp != 1) throw ConfigError("preset: output component must be 0 or 1");

  std::set<int> in(p.pressure_input_nodes.begin(), p.pressure_input_nodes.end());
  for (int n : p.pressure_zero_nodes)
    if (in.count(n)) throw ConfigError("preset: pressure input and zero sets overlap");

  std::set<int> ps(p.passive_solid_elems.begin(), p.passive_solid_elems.end());
  for (int e : p.passive_void_elems)
    if (ps.count(e)) throw ConfigError("preset: passive solid and void sets overlap");

  const int odof = p.output_dof(g);
  if (std::find(p.fixed_dofs.begin(), p.fixed_dofs.end(), odof) != p.fixed_dofs.end())
    throw ConfigError("preset: output DOF is fixed");
  if (p.spring_stiffness < 0.0) throw ConfigError("preset: spring stiffness must be >= 0");
}

Problem apply_preset(Grid grid, Preset preset) {
  validate_preset(grid, preset);
  return Problem{std::move(grid), std::move(preset)};
}

}  // namespace pacm
