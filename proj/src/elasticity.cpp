#include "pacm/elasticity.hpp"

#include <cmath>

namespace pacm {

namespace {
const double kGauss = 1.0 / std::sqrt(3.0);
}

void MaterialParams::validate() const {
  if (e1 <= 0.0) throw ConfigError("material: E1 must be positive");
  if (e0_ratio <= 0.0 || e0_ratio >= 1.0) throw ConfigError("material: E0/E1 must lie in (0,1)");
  if (nu < 0.0 || nu >= 0.5) throw ConfigError("material: Poisson ratio must lie in [0, 0.5)");
  if (zeta < 1.0) throw ConfigError("material: SIMP penalty must be >= 1");
  if (thickness <= 0.0) throw ConfigError("material: thickness must be positive");
}

double simp_modulus(double rho, const MaterialParams& m) {
  if (rho < -1e-12 || rho > 1.0 + 1e-12)
    throw NumericalError("simp_modulus: density outside [0,1]");
  return m.e0() + std::pow(rho, m.zeta) * (m.e1 - m.e0());
}

double simp_modulus_deriv(double rho, const MaterialParams& m) {
  if (rho < -1e-12 || rho > 1.0 + 1e-12)
    throw NumericalError("simp_modulus: density outside [0,1]");
  return m.zeta * std::pow(rho, m.zeta - 1.0) * (m.e1 - m.e0());
}

Eigen::Matrix<double, 8, 8> unit_element_stiffness(double dx, double dy, double nu, double t) {
  if (dx <= 0.0 || dy <= 0.0) throw NumericalError("element_stiffness: degenerate geometry");
  Eigen::Matrix3d d;
  const double c = 1.0 / (1.0 - nu * nu);  // E = 1
  d << c, c * nu, 0.0, c * nu, c, 0.0, 0.0, 0.0, c * (1.0 - nu) / 2.0;

  Eigen::Matrix<double, 8, 8> ke = Eigen::Matrix<double, 8, 8>::Zero();
  const double ax = 2.0 / dx, ay = 2.0 / dy;
  const double detj = 0.25 * dx * dy;
  for (int gx = 0; gx < 2; ++gx) {
    for (int gy = 0; gy < 2; ++gy) {
      const double xi = (gx == 0 ? -kGauss : kGauss);
      const double eta = (gy == 0 ? -kGauss : kGauss);
      const double dndx[4] = {-0.25 * (1 - eta) * ax, 0.25 * (1 - eta) * ax,
                              0.25 * (1 + eta) * ax, -0.25 * (1 + eta) * ax};
      const double dndy[4] = {-0.25 * (1 - xi) * ay, -0.25 * (1 + xi) * ay,
                              0.25 * (1 + xi) * ay, 0.25 * (1 - xi) * ay};
      Eigen::Matrix<double, 3, 8> b = Eigen::Matrix<double, 3, 8>::Zero();
      for (int a = 0; a < 4; ++a) {
        b(0, 2 * a) = dndx[a];
        b(1, 2 * a + 1) = dndy[a];
        b(2, 2 * a) = dndy[a];
        b(2, 2 * a + 1) = dndx[a];
      }
      ke += (detj * t) * b.transpose() * d * b;
    }
  }
  return ke;
}

ElasticOperator::ElasticOperator(const Grid& g, const MaterialParams& m) : mat_(m) {
  mat_.validate();
  ke_unit_ = unit_element_stiffness(g.dx, g.dy, m.nu, g.thickness);
}

SpMat ElasticOperator::assemble(const Grid& g, const Eigen::VectorXd& rho_bar,
                                const Preset& preset) const {
  if (rho_bar.size() != g.num_elems())
    throw ConfigError("assemble_stiffness: field size does not match element count");
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(g.num_elems()) * 64 + 1);
  for (int e = 0; e < g.num_elems(); ++e) {
    const double young = simp_modulus(rho_bar[e], mat_);
    const auto& c = g.conn[e];
    int dofs[8];
    for (int a = 0; a < 4; ++a) {
      dofs[2 * a] = g.udof(c[a], 0);
      dofs[2 * a + 1] = g.udof(c[a], 1);
    }
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) trips.emplace_back(dofs[i], dofs[j], young * ke_unit_(i, j));
  }
  const int odof = preset.output_dof(g);
  trips.emplace_back(odof, odof, preset.spring_stiffness);

  SpMat k(g.num_disp_dofs(), g.num_disp_dofs());
  k.setFromTriplets(trips.begin(), trips.end());
  return k;
}

ElasticSolveResult solve_elasticity_keep(const SpMat& k_full, const Grid& g, const Preset& preset,
                                         const Eigen::VectorXd& f) {
  DofReducer red = DofReducer::exclude(g.num_disp_dofs(), preset.fixed_dofs);
  SpdSystem sys(k_full, std::move(red), "elasticity solve");

  ElasticSolution sol;
  sol.u = sys.solve(f);
  Eigen::VectorXd fd = Eigen::VectorXd::Zero(g.num_disp_dofs());
  fd[preset.output_dof(g)] = preset.output_dir * preset.dummy_load;
  sol.v = sys.solve(fd);

  sol.se = 0.5 * sol.u.dot(f);        // 0.5 u^T K u with K u = F
  sol.mse = sol.v.dot(f);             // v^T K u
  sol.delta = sol.u[preset.output_dof(g)];
  return {std::move(sol), std::move(sys)};
}

ElasticSolution solve_elasticity(const SpMat& k_full, const Grid& g, const Preset& preset,
                                 const Eigen::VectorXd& f) {
  return solve_elasticity_keep(k_full, g, preset, f).sol;
}

}  // namespace pacm
