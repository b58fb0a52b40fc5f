#pragma once

#include <limits>
#include <string>

#include "pacm/darcy.hpp"
#include "pacm/elasticity.hpp"
#include "pacm/preset.hpp"

namespace pacm {

/// Filter radius given either in meters or as a multiple of the smallest
/// element dimension h = min(lx/nex, ly/ney).
struct FilterRadius {
  bool multiple_of_h = true;
  double value = 5.4;

  double absolute(const Grid& g) const { return multiple_of_h ? value * g.min_elem_size() : value; }
};

/// Full run configuration. Defaults reproduce the reference parameter set.
struct RunConfig {
  PresetKind preset = PresetKind::Inverter;

  // domain
  int nex = 200, ney = 100;
  double lx = 0.2, ly = 0.1;
  double thickness = 1e-3;

  // material
  double e1 = 3e9;
  double e0_ratio = 1e-6;
  double nu = 0.40;
  double zeta = 3.0;

  // pressure model
  double p_in = 1e5;
  double k_v = 1.0;
  double flow_contrast = 1e-7;  // K_s / K_v
  double drain_remainder = 0.1; // r
  double eta_kappa = 0.3, beta_kappa = 10.0;
  double eta_d = 0.2, beta_d = 10.0;
  double ds_factor = 2.0;  // delta_s = ds_factor * min element size
  double ds_abs = 0.0;     // overrides ds_factor when > 0

  // optimization
  double volfrac = 0.2;    // V_i*
  double delta_eta = 0.15;
  FilterRadius rfill;
  double move_limit = 0.1;
  int max_iter = 400;
  double mu = 1000.0;
  double beta_max = 128.0;
  int beta_double_every = 50;
  int vol_update_every = 25;
  double change_tol = 1e-4;

  // preset details
  int clamp_elems = 2;
  double spring_stiffness = 1e4;
  double dummy_load = 1.0;
  double output_x = std::numeric_limits<double>::quiet_NaN();  // NaN = preset default
  double output_y = std::numeric_limits<double>::quiet_NaN();
  int output_comp = -1;    // -1 = preset default, else 0|1
  double output_dir = 0.0; // 0 = preset default, else +-1
  std::string passive_solid_rects;  // "x0,y0,x1,y1;..." overrides
  std::string passive_void_rects;

  // io
  std::string out_dir = "out";
  int checkpoint_every = 25;
  bool write_fields = true;

  void validate() const;

  Grid make_grid() const;
  Problem make_problem() const;
  DarcyParams darcy_params(const Grid& g) const;
  MaterialParams material() const;
};

/// Parse a key = value configuration file ('#' comments). Unknown keys are
/// rejected with the offending key named. An empty file yields all defaults.
RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text);

/// Serialize every key; parse_config_text(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& c);
void write_config(const RunConfig& c, const std::string& path);

}  // namespace pacm
