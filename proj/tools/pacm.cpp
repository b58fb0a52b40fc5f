// Command-line driver: optimize / verify / extract / export.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "pacm/config.hpp"
#include "pacm/contour.hpp"
#include "pacm/nlfea.hpp"
#include "pacm/optimizer.hpp"
#include "pacm/vtk.hpp"

namespace fs = std::filesystem;
using namespace pacm;

namespace {

Eigen::VectorXd load_field(const std::string& path, int expected) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read field file '" + path + "'");
  std::vector<double> vals;
  double v;
  while (in >> v) vals.push_back(v);
  if (static_cast<int>(vals.size()) != expected)
    throw IoError("field file '" + path + "' has " + std::to_string(vals.size()) +
                  " values, expected " + std::to_string(expected));
  return Eigen::Map<Eigen::VectorXd>(vals.data(), expected);
}

void save_field(const Eigen::VectorXd& v, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write field file '" + path + "'");
  char buf[40];
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g\n", v[i]);
    out << buf;
  }
}

std::string resolve_out_dir(const std::string& configured) {
  if (const char* env = std::getenv("PACM_OUT_DIR"); env && *env) return env;
  return configured;
}

RunConfig load_config(const std::string& config_path) {
  if (config_path.empty()) return RunConfig{};
  return parse_config(config_path);
}

struct CliOverrides {
  std::string preset;
  int nex = -1, ney = -1, max_iter = -1;
  double volfrac = -1, delta_eta = -1, rfill_mult = -1;
  std::string out_dir;

  void apply(RunConfig& cfg) const {
    if (!preset.empty()) cfg.preset = preset_kind_from_string(preset);
    if (nex > 0) cfg.nex = nex;
    if (ney > 0) cfg.ney = ney;
    if (max_iter > 0) cfg.max_iter = max_iter;
    if (volfrac > 0) cfg.volfrac = volfrac;
    if (delta_eta >= 0) cfg.delta_eta = delta_eta;
    if (rfill_mult > 0) cfg.rfill = {true, rfill_mult};
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    cfg.validate();
  }
};

void add_override_flags(CLI::App* cmd, CliOverrides& ov) {
  cmd->add_option("--preset", ov.preset, "inverter|gripper|contractor");
  cmd->add_option("--nex", ov.nex, "elements along x");
  cmd->add_option("--ney", ov.ney, "elements along y");
  cmd->add_option("--volfrac", ov.volfrac, "intermediate volume fraction target");
  cmd->add_option("--delta-eta", ov.delta_eta, "projection threshold deviation");
  cmd->add_option("--rfill-mult", ov.rfill_mult, "filter radius as multiple of h");
  cmd->add_option("--max-iter", ov.max_iter, "iteration budget");
  cmd->add_option("--out-dir", ov.out_dir, "output directory");
}

void export_fields(const RunConfig& cfg, const Eigen::VectorXd& rho, const std::string& path) {
  Problem prob = cfg.make_problem();
  const Grid& g = prob.grid;
  const DensityFilter filter = DensityFilter::build(g, cfg.rfill.absolute(g));
  const DesignState st = make_design_state(rho, filter, cfg.beta_max, cfg.delta_eta, prob.preset);

  const DarcyOperator darcy(g);
  const ElasticOperator elas(g, cfg.material());
  const RealizationResult ri = evaluate_realization(g, prob.preset, darcy, elas,
                                                    cfg.darcy_params(g), st.rho_i, cfg.mu, false);
  VtkFields f;
  f.cell_scalars["rho_eroded"] = st.rho_e;
  f.cell_scalars["rho_intermediate"] = st.rho_i;
  f.cell_scalars["rho_dilated"] = st.rho_d;
  f.cell_scalars["design"] = st.rho;
  f.point_scalars["pressure"] = ri.pressure.p;
  f.point_vectors["displacement"] = ri.elastic.u;
  write_vtk_structured(g, f, path);
}

int cmd_optimize(const std::string& config_path, const CliOverrides& ov) {
  RunConfig cfg = load_config(config_path);
  ov.apply(cfg);
  const fs::path out = resolve_out_dir(cfg.out_dir);
  fs::create_directories(out);

  RunCallbacks cb;
  cb.on_checkpoint = [&](int iter, const Eigen::VectorXd& rho) {
    char name[40];
    std::snprintf(name, sizeof name, "rho_iter_%06d.txt", iter);
    save_field(rho, (out / name).string());
  };
  cb.on_iteration = [](const OptRecord& r, const Eigen::VectorXd&) {
    if (r.iter % 10 == 0)
      std::printf("iter %4d  beta %6.1f  f0(e,i,d) = %10.4f %10.4f %10.4f  vf_i = %.4f  Mnd_i = %.3f%%\n",
                  r.iter, r.beta, r.f0_e, r.f0_i, r.f0_d, r.vf_i, 100.0 * r.mnd_i);
  };

  const OptResult res = run_optimization(cfg, cb);

  write_config(cfg, (out / "config_used.txt").string());
  save_field(res.rho, (out / "rho_final.txt").string());
  {
    std::ofstream csv(out / "convergence.csv");
    if (!csv) throw IoError("cannot write convergence.csv");
    csv << log_to_csv(res.log);
  }
  if (cfg.write_fields) {
    export_fields(cfg, res.rho, (out / "fields.vtk").string());
    Problem prob = cfg.make_problem();
    const ContourSet cs = extract_contour(prob.grid, res.state.rho_i, 0.85);
    if (cs.loops.empty()) std::fprintf(stderr, "warning: no contour above threshold 0.85\n");
    write_polylines(cs, (out / "contour.txt").string());
    write_dxf(cs, (out / "contour.dxf").string());
  }
  const OptRecord& last = res.log.back();
  std::printf("done: %zu iterations, f0_i = %.4f, vf_i = %.4f, Mnd_i = %.3f%%, delta_i = %.4g m\n",
              res.log.size(), last.f0_i, last.vf_i, 100.0 * last.mnd_i, last.delta_i);
  return 0;
}

int cmd_verify(const std::string& config_path, const std::string& design_path,
               std::vector<double> pressures_bar, int steps, double threshold,
               const CliOverrides& ov) {
  RunConfig cfg = load_config(config_path);
  ov.apply(cfg);
  const fs::path out = resolve_out_dir(cfg.out_dir);
  fs::create_directories(out);

  Problem prob = cfg.make_problem();
  const Grid& g = prob.grid;
  const Eigen::VectorXd rho = load_field(design_path, g.num_elems());
  const DensityFilter filter = DensityFilter::build(g, cfg.rfill.absolute(g));
  const DesignState st = make_design_state(rho, filter, cfg.beta_max, cfg.delta_eta, prob.preset);

  const NlModel model = build_nl_model(prob, st.rho_i, threshold, cfg.e1, cfg.nu);
  std::printf("extracted mesh: %d elements, %d nodes, %zu pressurized edges\n",
              model.mesh.num_elems(), model.mesh.num_nodes(), model.boundary.edges.size());

  std::ofstream csv(out / "verification.csv");
  if (!csv) throw IoError("cannot write verification.csv");
  csv << "pressure_bar,output_displacement_m,converged,newton_steps\n";
  bool all_ok = true;
  for (double bar : pressures_bar) {
    const double p = bar * 1e5;
    const NlResult res = newton_solve(model, p, steps);
    const double delta = res.steps.empty() ? 0.0 : res.steps.back().output_disp;
    int total_iters = 0;
    for (const auto& s : res.steps) total_iters += s.newton_iters;
    char row[160];
    std::snprintf(row, sizeof row, "%.17g,%.17g,%d,%zu\n", bar, delta, res.converged ? 1 : 0,
                  res.steps.size());
    csv << row;
    std::printf("p = %5.1f bar: %s, output displacement = %.4f mm (%d Newton iterations)\n", bar,
                res.converged ? "converged" : "FAILED", 1e3 * delta, total_iters);
    if (!res.converged) {
      all_ok = false;
      std::fprintf(stderr, "  %s\n", res.message.c_str());
    }
    // Deformed configurations at every accepted load step.
    for (size_t k = 0; k < res.steps.size(); ++k) {
      VtkFields f;
      f.point_vectors["displacement"] = res.steps[k].u;
      char name[64];
      std::snprintf(name, sizeof name, "deformed_p%03.0fbar_step%02zu.vtk", bar, k + 1);
      write_vtk_unstructured(model.mesh.xs, model.mesh.ys, model.mesh.conn, f,
                             (out / name).string(), 1.0);
    }
  }
  if (!all_ok)
    std::fprintf(stderr, "note: non-converged levels hit the large-deformation/self-contact regime\n");
  return 0;
}

int cmd_extract(const std::string& config_path, const std::string& design_path, double threshold,
                const CliOverrides& ov) {
  RunConfig cfg = load_config(config_path);
  ov.apply(cfg);
  const fs::path out = resolve_out_dir(cfg.out_dir);
  fs::create_directories(out);

  Problem prob = cfg.make_problem();
  const Grid& g = prob.grid;
  const Eigen::VectorXd rho = load_field(design_path, g.num_elems());
  const DensityFilter filter = DensityFilter::build(g, cfg.rfill.absolute(g));
  const DesignState st = make_design_state(rho, filter, cfg.beta_max, cfg.delta_eta, prob.preset);

  const ContourSet cs = extract_contour(g, st.rho_i, threshold);
  if (cs.loops.empty()) std::fprintf(stderr, "warning: nothing above threshold %.2f\n", threshold);
  write_polylines(cs, (out / "contour.txt").string());
  write_dxf(cs, (out / "contour.dxf").string());
  std::printf("wrote %zu contour loops to %s\n", cs.loops.size(), (out / "contour.txt").c_str());
  return 0;
}

int cmd_export(const std::string& config_path, const std::string& design_path,
               const CliOverrides& ov) {
  RunConfig cfg = load_config(config_path);
  ov.apply(cfg);
  const fs::path out = resolve_out_dir(cfg.out_dir);
  fs::create_directories(out);
  Problem prob = cfg.make_problem();
  const Eigen::VectorXd rho = load_field(design_path, prob.grid.num_elems());
  export_fields(cfg, rho, (out / "fields.vtk").string());
  std::printf("wrote %s\n", (out / "fields.vtk").c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pressure-actuated compliant mechanism synthesis toolkit"};
  app.require_subcommand(1);

  std::string config_path, design_path;
  std::vector<double> pressures = {10.0, 25.0, 50.0};
  int steps = 25;
  double threshold = 0.85;
  CliOverrides ov;

  auto* opt = app.add_subcommand("optimize", "run the robust min-max optimization");
  opt->add_option("--config", config_path, "configuration file (key = value)");
  add_override_flags(opt, ov);

  auto* ver = app.add_subcommand("verify", "nonlinear verification of an optimized design");
  ver->add_option("--config", config_path, "configuration file");
  ver->add_option("--design", design_path, "design vector file (rho_final.txt)")->required();
  ver->add_option("--pressures", pressures, "pressure levels in bar");
  ver->add_option("--steps", steps, "initial load step count");
  ver->add_option("--threshold", threshold, "extraction density threshold");
  add_override_flags(ver, ov);

  auto* ext = app.add_subcommand("extract", "iso-contour extraction of an optimized design");
  ext->add_option("--config", config_path, "configuration file");
  ext->add_option("--design", design_path, "design vector file")->required();
  ext->add_option("--threshold", threshold, "iso-contour threshold");
  add_override_flags(ext, ov);

  auto* exp = app.add_subcommand("export", "VTK export of design, pressure and displacement fields");
  exp->add_option("--config", config_path, "configuration file");
  exp->add_option("--design", design_path, "design vector file")->required();
  add_override_flags(exp, ov);

  CLI11_PARSE(app, argc, argv);

  try {
    if (opt->parsed()) return cmd_optimize(config_path, ov);
    if (ver->parsed()) return cmd_verify(config_path, design_path, pressures, steps, threshold, ov);
    if (ext->parsed()) return cmd_extract(config_path, design_path, threshold, ov);
    if (exp->parsed()) return cmd_export(config_path, design_path, ov);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  } catch (const IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return 4;
  }
  return 0;
}
