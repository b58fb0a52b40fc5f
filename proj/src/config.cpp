#include "pacm/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace pacm {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' expects a number, got '" + v + "'");
  }
}

int parse_int(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const int x = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' expects an integer, got '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config: key '" + key + "' expects a boolean, got '" + v + "'");
}

FilterRadius parse_rfill(const std::string& v) {
  FilterRadius r;
  if (!v.empty() && v.back() == 'h') {
    r.multiple_of_h = true;
    r.value = parse_double("rfill", v.substr(0, v.size() - 1));
  } else {
    r.multiple_of_h = false;
    r.value = parse_double("rfill", v);
  }
  if (r.value <= 0.0) throw ConfigError("config: rfill must be positive");
  return r;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<Rect> parse_rects(const std::string& key, const std::string& v) {
  std::vector<Rect> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ';')) {
    item = trim(item);
    if (item.empty()) continue;
    Rect r{};
    if (std::sscanf(item.c_str(), "%lf,%lf,%lf,%lf", &r.x0, &r.y0, &r.x1, &r.y1) != 4)
      throw ConfigError("config: key '" + key + "' expects rects 'x0,y0,x1,y1;...'");
    out.push_back(r);
  }
  return out;
}

}  // namespace

void RunConfig::validate() const {
  if (nex <= 0 || ney <= 0) throw ConfigError("config: nex/ney must be positive");
  if (lx <= 0 || ly <= 0 || thickness <= 0) throw ConfigError("config: domain sizes must be positive");
  if (delta_eta < 0.0 || delta_eta > 0.5) throw ConfigError("config: delta_eta must lie in [0, 0.5]");
  if (volfrac <= 0.0 || volfrac >= 1.0) throw ConfigError("config: volfrac must lie in (0,1)");
  if (move_limit <= 0.0 || move_limit > 1.0) throw ConfigError("config: move_limit must lie in (0,1]");
  if (max_iter < 1) throw ConfigError("config: max_iter must be >= 1");
  if (mu <= 0.0) throw ConfigError("config: mu must be positive");
  if (beta_max < 1.0) throw ConfigError("config: beta_max must be >= 1");
  if (beta_double_every < 1) throw ConfigError("config: beta_double_every must be >= 1");
  if (vol_update_every < 1) throw ConfigError("config: vol_update_every must be >= 1");
  if (output_comp < -1 || output_comp > 1) throw ConfigError("config: output.comp must be x or y");
  material().validate();
  DarcyParams dp = darcy_params(make_grid());
  dp.validate();
}

Grid RunConfig::make_grid() const { return build_grid(nex, ney, lx, ly, thickness); }

Problem RunConfig::make_problem() const {
  Grid g = make_grid();
  PresetOptions opt;
  opt.clamp_elems = clamp_elems;
  opt.p_in = p_in;
  opt.spring_stiffness = spring_stiffness;
  opt.dummy_load = dummy_load;
  if (!std::isnan(output_x) && !std::isnan(output_y)) opt.output_point = {{output_x, output_y}};
  if (output_comp >= 0) opt.output_comp = output_comp;
  if (output_dir != 0.0) opt.output_dir = output_dir;
  if (!passive_solid_rects.empty()) opt.passive_solid = parse_rects("passive.solid", passive_solid_rects);
  if (!passive_void_rects.empty()) opt.passive_void = parse_rects("passive.void", passive_void_rects);
  Preset p = make_preset(g, preset, opt);
  return apply_preset(std::move(g), std::move(p));
}

DarcyParams RunConfig::darcy_params(const Grid& g) const {
  DarcyParams dp;
  dp.k_v = k_v;
  dp.epsilon = flow_contrast;
  dp.eta_kappa = eta_kappa;
  dp.beta_kappa = beta_kappa;
  dp.eta_d = eta_d;
  dp.beta_d = beta_d;
  dp.r = drain_remainder;
  dp.delta_s = ds_abs > 0.0 ? ds_abs : ds_factor * g.min_elem_size();
  return dp;
}

MaterialParams RunConfig::material() const {
  MaterialParams m;
  m.e1 = e1;
  m.e0_ratio = e0_ratio;
  m.nu = nu;
  m.zeta = zeta;
  m.thickness = thickness;
  return m;
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig c;
  using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;
  static const std::map<std::string, Setter> setters = {
      {"preset", [](RunConfig& c, const std::string&, const std::string& v) { c.preset = preset_kind_from_string(v); }},
      {"nex", [](RunConfig& c, const std::string& k, const std::string& v) { c.nex = parse_int(k, v); }},
      {"ney", [](RunConfig& c, const std::string& k, const std::string& v) { c.ney = parse_int(k, v); }},
      {"lx", [](RunConfig& c, const std::string& k, const std::string& v) { c.lx = parse_double(k, v); }},
      {"ly", [](RunConfig& c, const std::string& k, const std::string& v) { c.ly = parse_double(k, v); }},
      {"thickness", [](RunConfig& c, const std::string& k, const std::string& v) { c.thickness = parse_double(k, v); }},
      {"e1", [](RunConfig& c, const std::string& k, const std::string& v) { c.e1 = parse_double(k, v); }},
      {"e0_ratio", [](RunConfig& c, const std::string& k, const std::string& v) { c.e0_ratio = parse_double(k, v); }},
      {"nu", [](RunConfig& c, const std::string& k, const std::string& v) { c.nu = parse_double(k, v); }},
      {"zeta", [](RunConfig& c, const std::string& k, const std::string& v) { c.zeta = parse_double(k, v); }},
      {"p_in", [](RunConfig& c, const std::string& k, const std::string& v) { c.p_in = parse_double(k, v); }},
      {"k_v", [](RunConfig& c, const std::string& k, const std::string& v) { c.k_v = parse_double(k, v); }},
      {"flow_contrast", [](RunConfig& c, const std::string& k, const std::string& v) { c.flow_contrast = parse_double(k, v); }},
      {"drain_remainder", [](RunConfig& c, const std::string& k, const std::string& v) { c.drain_remainder = parse_double(k, v); }},
      {"eta_kappa", [](RunConfig& c, const std::string& k, const std::string& v) { c.eta_kappa = parse_double(k, v); }},
      {"beta_kappa", [](RunConfig& c, const std::string& k, const std::string& v) { c.beta_kappa = parse_double(k, v); }},
      {"eta_d", [](RunConfig& c, const std::string& k, const std::string& v) { c.eta_d = parse_double(k, v); }},
      {"beta_d", [](RunConfig& c, const std::string& k, const std::string& v) { c.beta_d = parse_double(k, v); }},
      {"ds_factor", [](RunConfig& c, const std::string& k, const std::string& v) { c.ds_factor = parse_double(k, v); }},
      {"ds_abs", [](RunConfig& c, const std::string& k, const std::string& v) { c.ds_abs = parse_double(k, v); }},
      {"volfrac", [](RunConfig& c, const std::string& k, const std::string& v) { c.volfrac = parse_double(k, v); }},
      {"delta_eta", [](RunConfig& c, const std::string& k, const std::string& v) { c.delta_eta = parse_double(k, v); }},
      {"rfill", [](RunConfig& c, const std::string&, const std::string& v) { c.rfill = parse_rfill(v); }},
      {"move_limit", [](RunConfig& c, const std::string& k, const std::string& v) { c.move_limit = parse_double(k, v); }},
      {"max_iter", [](RunConfig& c, const std::string& k, const std::string& v) { c.max_iter = parse_int(k, v); }},
      {"mu", [](RunConfig& c, const std::string& k, const std::string& v) { c.mu = parse_double(k, v); }},
      {"beta_max", [](RunConfig& c, const std::string& k, const std::string& v) { c.beta_max = parse_double(k, v); }},
      {"beta_double_every", [](RunConfig& c, const std::string& k, const std::string& v) { c.beta_double_every = parse_int(k, v); }},
      {"vol_update_every", [](RunConfig& c, const std::string& k, const std::string& v) { c.vol_update_every = parse_int(k, v); }},
      {"change_tol", [](RunConfig& c, const std::string& k, const std::string& v) { c.change_tol = parse_double(k, v); }},
      {"bcs.clamp_elems", [](RunConfig& c, const std::string& k, const std::string& v) { c.clamp_elems = parse_int(k, v); }},
      {"spring.stiffness", [](RunConfig& c, const std::string& k, const std::string& v) { c.spring_stiffness = parse_double(k, v); }},
      {"dummy_load", [](RunConfig& c, const std::string& k, const std::string& v) { c.dummy_load = parse_double(k, v); }},
      {"output.x", [](RunConfig& c, const std::string& k, const std::string& v) { c.output_x = parse_double(k, v); }},
      {"output.y", [](RunConfig& c, const std::string& k, const std::string& v) { c.output_y = parse_double(k, v); }},
      {"output.comp", [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v == "x") c.output_comp = 0;
         else if (v == "y") c.output_comp = 1;
         else throw ConfigError("config: key '" + k + "' expects x or y");
       }},
      {"output.dir", [](RunConfig& c, const std::string& k, const std::string& v) {
         const double d = parse_double(k, v);
         if (d != 1.0 && d != -1.0) throw ConfigError("config: output.dir must be +1 or -1");
         c.output_dir = d;
       }},
      {"passive.solid", [](RunConfig& c, const std::string& k, const std::string& v) {
         parse_rects(k, v);
         c.passive_solid_rects = v;
       }},
      {"passive.void", [](RunConfig& c, const std::string& k, const std::string& v) {
         parse_rects(k, v);
         c.passive_void_rects = v;
       }},
      {"out_dir", [](RunConfig& c, const std::string&, const std::string& v) { c.out_dir = v; }},
      {"checkpoint_every", [](RunConfig& c, const std::string& k, const std::string& v) { c.checkpoint_every = parse_int(k, v); }},
      {"write_fields", [](RunConfig& c, const std::string& k, const std::string& v) { c.write_fields = parse_bool(k, v); }},
  };

  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(lineno) + " is not 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("config: unknown key '" + key + "'");
    it->second(c, key, val);
  }
  c.validate();
  return c;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("config: cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream os;
  os << "preset = " << to_string(c.preset) << "\n";
  os << "nex = " << c.nex << "\n";
  os << "ney = " << c.ney << "\n";
  os << "lx = " << fmt(c.lx) << "\n";
  os << "ly = " << fmt(c.ly) << "\n";
  os << "thickness = " << fmt(c.thickness) << "\n";
  os << "e1 = " << fmt(c.e1) << "\n";
  os << "e0_ratio = " << fmt(c.e0_ratio) << "\n";
  os << "nu = " << fmt(c.nu) << "\n";
  os << "zeta = " << fmt(c.zeta) << "\n";
  os << "p_in = " << fmt(c.p_in) << "\n";
  os << "k_v = " << fmt(c.k_v) << "\n";
  os << "flow_contrast = " << fmt(c.flow_contrast) << "\n";
  os << "drain_remainder = " << fmt(c.drain_remainder) << "\n";
  os << "eta_kappa = " << fmt(c.eta_kappa) << "\n";
  os << "beta_kappa = " << fmt(c.beta_kappa) << "\n";
  os << "eta_d = " << fmt(c.eta_d) << "\n";
  os << "beta_d = " << fmt(c.beta_d) << "\n";
  os << "ds_factor = " << fmt(c.ds_factor) << "\n";
  os << "ds_abs = " << fmt(c.ds_abs) << "\n";
  os << "volfrac = " << fmt(c.volfrac) << "\n";
  os << "delta_eta = " << fmt(c.delta_eta) << "\n";
  if (c.rfill.multiple_of_h)
    os << "rfill = " << fmt(c.rfill.value) << "h\n";
  else
    os << "rfill = " << fmt(c.rfill.value) << "\n";
  os << "move_limit = " << fmt(c.move_limit) << "\n";
  os << "max_iter = " << c.max_iter << "\n";
  os << "mu = " << fmt(c.mu) << "\n";
  os << "beta_max = " << fmt(c.beta_max) << "\n";
  os << "beta_double_every = " << c.beta_double_every << "\n";
  os << "vol_update_every = " << c.vol_update_every << "\n";
  os << "change_tol = " << fmt(c.change_tol) << "\n";
  os << "bcs.clamp_elems = " << c.clamp_elems << "\n";
  os << "spring.stiffness = " << fmt(c.spring_stiffness) << "\n";
  os << "dummy_load = " << fmt(c.dummy_load) << "\n";
  if (!std::isnan(c.output_x)) os << "output.x = " << fmt(c.output_x) << "\n";
  if (!std::isnan(c.output_y)) os << "output.y = " << fmt(c.output_y) << "\n";
  if (c.output_comp >= 0) os << "output.comp = " << (c.output_comp == 0 ? "x" : "y") << "\n";
  if (c.output_dir != 0.0) os << "output.dir = " << fmt(c.output_dir) << "\n";
  if (!c.passive_solid_rects.empty()) os << "passive.solid = " << c.passive_solid_rects << "\n";
  if (!c.passive_void_rects.empty()) os << "passive.void = " << c.passive_void_rects << "\n";
  os << "out_dir = " << c.out_dir << "\n";
  os << "checkpoint_every = " << c.checkpoint_every << "\n";
  os << "write_fields = " << (c.write_fields ? "true" : "false") << "\n";
  return os.str();
}

void write_config(const RunConfig& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("config: cannot write '" + path + "'");
  out << serialize_config(c);
}

}  // namespace pacm
