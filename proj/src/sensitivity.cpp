#include "pacm/sensitivity.hpp"

namespace pacm {

double objective(double mse, double se, double mu) {
  if (!(se > 0.0)) throw NumericalError("objective: degenerate state, SE <= 0");
  return -mu * mse / se;
}

Eigen::VectorXd objective_sensitivity(const Grid& g, const ElasticOperator& elas,
                                      const Eigen::VectorXd& rho_bar, const Eigen::VectorXd& u,
                                      const Eigen::VectorXd& v, double mse, double se, double mu) {
  Eigen::VectorXd theta1(g.num_elems());
  const auto& ke0 = elas.unit_ke();
  const double inv_se = 1.0 / se;
  const double c_u = -mse / (2.0 * se * se);
  for (int e = 0; e < g.num_elems(); ++e) {
    const auto& c = g.conn[e];
    Eigen::Matrix<double, 8, 1> ue, ve;
    for (int a = 0; a < 4; ++a) {
      ue[2 * a] = u[g.udof(c[a], 0)];
      ue[2 * a + 1] = u[g.udof(c[a], 1)];
      ve[2 * a] = v[g.udof(c[a], 0)];
      ve[2 * a + 1] = v[g.udof(c[a], 1)];
    }
    const double dE = simp_modulus_deriv(rho_bar[e], elas.material());
    const Eigen::Matrix<double, 8, 1> kd = ke0 * (c_u * ue + inv_se * ve);
    theta1[e] = mu * dE * ue.dot(kd);
  }
  return theta1;
}

Eigen::VectorXd load_sensitivity(const Grid& g, const DarcyOperator& darcy,
                                 const DarcyParams& dp, const Eigen::VectorXd& rho_bar,
                                 const Eigen::VectorXd& p, const SpdSystem& pressure_system,
                                 const Eigen::VectorXd& lambda1) {
  // Adjoint solve reuses the pressure factorization; lambda2 vanishes on the
  // Dirichlet pressure dofs.
  const Eigen::VectorXd rhs = -(darcy.transformation().transpose() * lambda1);
  const Eigen::VectorXd lambda2 = pressure_system.solve(rhs);

  Eigen::VectorXd theta2(g.num_elems());
  for (int e = 0; e < g.num_elems(); ++e) {
    const auto& c = g.conn[e];
    Eigen::Vector4d pe, le;
    for (int a = 0; a < 4; ++a) {
      pe[a] = p[g.pdof(c[a])];
      le[a] = lambda2[g.pdof(c[a])];
    }
    theta2[e] = le.dot(darcy.elem_matrix_deriv(rho_bar[e], dp) * pe);
  }
  return theta2;
}

VolumeResult volume_and_sensitivity(const Eigen::VectorXd& rho_bar, const Grid& g) {
  VolumeResult r;
  const double ve = g.dx * g.dy;
  r.dv = Eigen::VectorXd::Constant(rho_bar.size(), ve);
  r.volume = ve * rho_bar.sum();
  r.fraction = r.volume / (g.lx * g.ly);
  return r;
}

RealizationResult evaluate_realization(const Grid& g, const Preset& preset,
                                       const DarcyOperator& darcy, const ElasticOperator& elas,
                                       const DarcyParams& dp, const Eigen::VectorXd& rho_bar,
                                       double mu, bool with_gradient, bool with_load_sensitivity) {
  RealizationResult out;

  const SpMat a = darcy.assemble(g, rho_bar, dp);
  const PressureBcs bcs = PressureBcs::from_preset(g, preset);
  PressureSolveResult psol = solve_pressure(a, bcs);
  out.pressure.p = psol.p;
  out.pressure.f = nodal_loads(darcy.transformation(), psol.p);

  const SpMat k = elas.assemble(g, rho_bar, preset);
  ElasticSolveResult esol = solve_elasticity_keep(k, g, preset, out.pressure.f);
  out.elastic = esol.sol;
  out.f0 = objective(out.elastic.mse, out.elastic.se, mu);

  if (with_gradient) {
    const double se = out.elastic.se, mse = out.elastic.mse;
    out.dfdrho_bar = objective_sensitivity(g, elas, rho_bar, out.elastic.u, out.elastic.v, mse, se, mu);
    if (with_load_sensitivity) {
      // lambda1 = mu (v/SE - u MSE/SE^2); already zero on fixed dofs.
      const Eigen::VectorXd lambda1 =
          mu * (out.elastic.v / se - out.elastic.u * (mse / (se * se)));
      out.dfdrho_bar +=
          load_sensitivity(g, darcy, dp, rho_bar, psol.p, psol.system, lambda1);
    }
    mask_passive(out.dfdrho_bar, preset);
  }
  return out;
}

}  // namespace pacm
