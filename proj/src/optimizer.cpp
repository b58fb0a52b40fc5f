#include "pacm/optimizer.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace pacm {

double beta_schedule(int iter, int period, double beta_max) {
  if (iter < 1) throw ConfigError("beta_schedule: iteration index starts at 1");
  const double beta = std::pow(2.0, (iter - 1) / period);
  return std::min(beta, beta_max);
}

double dilated_volume_update(double vi_star, double vf_intermediate, double vf_dilated) {
  if (!(vf_intermediate > 0.0))
    throw NumericalError("dilated volume update: intermediate volume is zero");
  return vi_star / vf_intermediate * vf_dilated;
}

std::string log_to_csv(const OptLog& log) {
  std::ostringstream os;
  os << "iter,beta,f0_eroded,f0_intermediate,f0_dilated,"
        "vf_eroded,vf_intermediate,vf_dilated,mnd_intermediate,delta_intermediate\n";
  char buf[64];
  auto put = [&](double x, char sep) {
    std::snprintf(buf, sizeof buf, "%.17g%c", x, sep);
    os << buf;
  };
  for (const auto& r : log) {
    os << r.iter << ',';
    put(r.beta, ',');
    put(r.f0_e, ',');
    put(r.f0_i, ',');
    put(r.f0_d, ',');
    put(r.vf_e, ',');
    put(r.vf_i, ',');
    put(r.vf_d, ',');
    put(r.mnd_i, ',');
    put(r.delta_i, '\n');
  }
  return os.str();
}

OptResult run_optimization(const RunConfig& cfg, const RunCallbacks& cb) {
  cfg.validate();
  Problem prob = cfg.make_problem();
  const Grid& g = prob.grid;
  const Preset& preset = prob.preset;

  const DarcyParams dp = cfg.darcy_params(g);
  const MaterialParams mat = cfg.material();
  const DarcyOperator darcy(g);
  const ElasticOperator elas(g, mat);
  const DensityFilter filter = DensityFilter::build(g, cfg.rfill.absolute(g));

  const int ne = g.num_elems();

  // Design variables exclude passive elements.
  std::vector<char> is_passive(ne, 0);
  for (int e : preset.passive_solid_elems) is_passive[e] = 1;
  for (int e : preset.passive_void_elems) is_passive[e] = 1;
  std::vector<int> design_elems;
  design_elems.reserve(ne);
  for (int e = 0; e < ne; ++e)
    if (!is_passive[e]) design_elems.push_back(e);
  const int nd = static_cast<int>(design_elems.size());
  if (nd == 0) throw ConfigError("run: no design elements (everything passive)");

  auto compress = [&](const Eigen::VectorXd& full) {
    Eigen::VectorXd x(nd);
    for (int i = 0; i < nd; ++i) x[i] = full[design_elems[i]];
    return x;
  };

  // Uniform volume-feasible start on the design elements.
  Eigen::VectorXd rho = Eigen::VectorXd::Constant(ne, cfg.volfrac);
  for (int e : preset.passive_solid_elems) rho[e] = 1.0;
  for (int e : preset.passive_void_elems) rho[e] = 0.0;

  const int m = 4;  // three objectives + dilated volume constraint
  Mma mma(nd, m);
  Eigen::VectorXd a(m), c(m), d(m);
  a << 1.0, 1.0, 1.0, 0.0;
  c.setConstant(1000.0);
  d.setOnes();

  double vd_star = cfg.volfrac;  // dilated target starts at V_i*
  OptResult result;

  for (int iter = 1; iter <= cfg.max_iter; ++iter) {
    const double beta = beta_schedule(iter, cfg.beta_double_every, cfg.beta_max);
    DesignState state = make_design_state(rho, filter, beta, cfg.delta_eta, preset);

    const VolumeResult vol_i = volume_and_sensitivity(state.rho_i, g);
    const VolumeResult vol_d = volume_and_sensitivity(state.rho_d, g);
    const VolumeResult vol_e = volume_and_sensitivity(state.rho_e, g);
    if (iter % cfg.vol_update_every == 0)
      vd_star = dilated_volume_update(cfg.volfrac, vol_i.fraction, vol_d.fraction);

    const RealizationResult re =
        evaluate_realization(g, preset, darcy, elas, dp, state.rho_e, cfg.mu, true);
    const RealizationResult ri =
        evaluate_realization(g, preset, darcy, elas, dp, state.rho_i, cfg.mu, true);
    const RealizationResult rd =
        evaluate_realization(g, preset, darcy, elas, dp, state.rho_d, cfg.mu, true);

    // Gradients with respect to the design vector.
    const Eigen::VectorXd g_e = backprop(re.dfdrho_bar, state.rho_tilde, beta, 0.5 + cfg.delta_eta, filter);
    const Eigen::VectorXd g_i = backprop(ri.dfdrho_bar, state.rho_tilde, beta, 0.5, filter);
    const Eigen::VectorXd g_d = backprop(rd.dfdrho_bar, state.rho_tilde, beta, 0.5 - cfg.delta_eta, filter);

    const double gvol = vol_d.fraction / vd_star - 1.0;
    Eigen::VectorXd dvol_bar = vol_d.dv / (g.lx * g.ly * vd_star);
    mask_passive(dvol_bar, preset);
    const Eigen::VectorXd g_vol = backprop(dvol_bar, state.rho_tilde, beta, 0.5 - cfg.delta_eta, filter);

    // MMA rows. Svanberg's bound variable z stays nonnegative, so the
    // (negative) objectives are shifted by a constant the z-row absorbs.
    const double fmin = std::min({re.f0, ri.f0, rd.f0});
    const double shift = std::max(10.0 * cfg.mu, -2.0 * fmin);
    Eigen::VectorXd fval(m);
    fval << re.f0 + shift, ri.f0 + shift, rd.f0 + shift, gvol;
    Eigen::MatrixXd dfdx(m, nd);
    dfdx.row(0) = compress(g_e);
    dfdx.row(1) = compress(g_i);
    dfdx.row(2) = compress(g_d);
    dfdx.row(3) = compress(g_vol);

    const Eigen::VectorXd x = compress(rho);
    const Eigen::VectorXd xmin = (x.array() - cfg.move_limit).cwiseMax(0.0).matrix();
    const Eigen::VectorXd xmax = (x.array() + cfg.move_limit).cwiseMin(1.0).matrix();
    const Eigen::VectorXd df0 = Eigen::VectorXd::Zero(nd);
    const Eigen::VectorXd x_new = mma.update(x, df0, dfdx, fval, xmin, xmax, a, c, d);

    double change = 0.0;
    for (int i = 0; i < nd; ++i) {
      change = std::max(change, std::abs(x_new[i] - x[i]));
      rho[design_elems[i]] = x_new[i];
    }

    OptRecord rec;
    rec.iter = iter;
    rec.beta = beta;
    rec.f0_e = re.f0;
    rec.f0_i = ri.f0;
    rec.f0_d = rd.f0;
    rec.vf_e = vol_e.fraction;
    rec.vf_i = vol_i.fraction;
    rec.vf_d = vol_d.fraction;
    rec.mnd_i = gray_indicator(state.rho_i);
    rec.delta_i = ri.elastic.delta;
    result.log.push_back(rec);
    if (cb.on_iteration) cb.on_iteration(rec, rho);
    if (cb.on_checkpoint && cfg.checkpoint_every > 0 && iter % cfg.checkpoint_every == 0)
      cb.on_checkpoint(iter, rho);

    if (beta >= cfg.beta_max && change < cfg.change_tol) {
      result.stopped_early = iter < cfg.max_iter;
      break;
    }
  }

  result.rho = rho;
  const double beta_final = beta_schedule(static_cast<int>(result.log.size()),
                                          cfg.beta_double_every, cfg.beta_max);
  result.state = make_design_state(rho, filter, beta_final, cfg.delta_eta, preset);
  result.vd_star = vd_star;
  return result;
}

}  // namespace pacm
