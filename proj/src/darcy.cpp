#include "pacm/darcy.hpp"

#include <cmath>

namespace pacm {

namespace {
constexpr double kBetaTiny = 1e-12;
const double kGauss = 1.0 / std::sqrt(3.0);

void shape(double xi, double eta, double n[4]) {
  n[0] = 0.25 * (1 - xi) * (1 - eta);
  n[1] = 0.25 * (1 + xi) * (1 - eta);
  n[2] = 0.25 * (1 + xi) * (1 + eta);
  n[3] = 0.25 * (1 - xi) * (1 + eta);
}

void shape_grad_ref(double xi, double eta, double dxi[4], double deta[4]) {
  dxi[0] = -0.25 * (1 - eta); dxi[1] = 0.25 * (1 - eta);
  dxi[2] = 0.25 * (1 + eta);  dxi[3] = -0.25 * (1 + eta);
  deta[0] = -0.25 * (1 - xi); deta[1] = -0.25 * (1 + xi);
  deta[2] = 0.25 * (1 + xi);  deta[3] = 0.25 * (1 - xi);
}

void check_unit_interval(double rho, const char* what) {
  if (rho < -1e-12 || rho > 1.0 + 1e-12)
    throw NumericalError(std::string(what) + ": density outside [0,1]");
}
}  // namespace

void DarcyParams::validate() const {
  if (epsilon <= 0.0 || epsilon > 1.0) throw ConfigError("darcy: flow contrast must lie in (0,1]");
  if (r <= 0.0 || r >= 1.0) throw ConfigError("darcy: remainder fraction r must lie in (0,1)");
  if (delta_s <= 0.0) throw ConfigError("darcy: penetration depth must be positive");
  if (beta_kappa <= 0.0 || beta_d <= 0.0) throw ConfigError("darcy: step slopes must be positive");
  if (eta_kappa < 0.0 || eta_kappa > 1.0 || eta_d < 0.0 || eta_d > 1.0)
    throw ConfigError("darcy: step positions must lie in [0,1]");
  if (k_v <= 0.0) throw ConfigError("darcy: void flow coefficient must be positive");
}

double smooth_step(double x, double beta, double eta) {
  if (beta < kBetaTiny) return x;
  const double denom = std::tanh(beta * eta) + std::tanh(beta * (1.0 - eta));
  return (std::tanh(beta * eta) + std::tanh(beta * (x - eta))) / denom;
}

double smooth_step_deriv(double x, double beta, double eta) {
  if (beta < kBetaTiny) return 1.0;
  const double denom = std::tanh(beta * eta) + std::tanh(beta * (1.0 - eta));
  const double th = std::tanh(beta * (x - eta));
  return beta * (1.0 - th * th) / denom;
}

double flow_coefficient(double rho, const DarcyParams& p) {
  check_unit_interval(rho, "flow_coefficient");
  return p.k_v * (1.0 - (1.0 - p.epsilon) * smooth_step(rho, p.beta_kappa, p.eta_kappa));
}

double flow_coefficient_deriv(double rho, const DarcyParams& p) {
  check_unit_interval(rho, "flow_coefficient");
  return -p.k_v * (1.0 - p.epsilon) * smooth_step_deriv(rho, p.beta_kappa, p.eta_kappa);
}

double drainage_coefficient(double rho, const DarcyParams& p) {
  check_unit_interval(rho, "drainage_coefficient");
  return p.drain_solid() * smooth_step(rho, p.beta_d, p.eta_d);
}

double drainage_coefficient_deriv(double rho, const DarcyParams& p) {
  check_unit_interval(rho, "drainage_coefficient");
  return p.drain_solid() * smooth_step_deriv(rho, p.beta_d, p.eta_d);
}

DarcyOperator::DarcyOperator(const Grid& g) {
  grad_ref_.setZero();
  mass_ref_.setZero();
  coupling_ref_.setZero();

  const double ax = 2.0 / g.dx;  // d xi / d x
  const double ay = 2.0 / g.dy;
  const double detj = 0.25 * g.dx * g.dy;
  const double t = g.thickness;

  for (int gx = 0; gx < 2; ++gx) {
    for (int gy = 0; gy < 2; ++gy) {
      const double xi = (gx == 0 ? -kGauss : kGauss);
      const double eta = (gy == 0 ? -kGauss : kGauss);
      double n[4], dxi[4], deta[4];
      shape(xi, eta, n);
      shape_grad_ref(xi, eta, dxi, deta);
      Eigen::Matrix<double, 2, 4> bp;
      for (int a = 0; a < 4; ++a) {
        bp(0, a) = dxi[a] * ax;
        bp(1, a) = deta[a] * ay;
      }
      const double w = detj * t;
      grad_ref_ += w * bp.transpose() * bp;
      Eigen::Matrix<double, 1, 4> nv;
      for (int a = 0; a < 4; ++a) nv(0, a) = n[a];
      mass_ref_ += w * nv.transpose() * nv;
      Eigen::Matrix<double, 2, 8> nu = Eigen::Matrix<double, 2, 8>::Zero();
      for (int a = 0; a < 4; ++a) {
        nu(0, 2 * a) = n[a];
        nu(1, 2 * a + 1) = n[a];
      }
      coupling_ref_ += w * nu.transpose() * bp;
    }
  }

  // Assemble the global transformation matrix (geometry only).
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(g.num_elems()) * 32);
  for (int e = 0; e < g.num_elems(); ++e) {
    const auto& c = g.conn[e];
    for (int a = 0; a < 4; ++a) {
      for (int comp = 0; comp < 2; ++comp) {
        const int row = g.udof(c[a], comp);
        for (int b = 0; b < 4; ++b)
          trips.emplace_back(row, g.pdof(c[b]), coupling_ref_(2 * a + comp, b));
      }
    }
  }
  t_mat_.resize(g.num_disp_dofs(), g.num_pressure_dofs());
  t_mat_.setFromTriplets(trips.begin(), trips.end());
}

SpMat DarcyOperator::assemble(const Grid& g, const Eigen::VectorXd& rho_bar,
                              const DarcyParams& p) const {
  if (rho_bar.size() != g.num_elems())
    throw ConfigError("assemble_darcy: field size does not match element count");
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(g.num_elems()) * 16);
  for (int e = 0; e < g.num_elems(); ++e) {
    const Eigen::Matrix4d ae = elem_matrix(rho_bar[e], p);
    const auto& c = g.conn[e];
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) trips.emplace_back(g.pdof(c[a]), g.pdof(c[b]), ae(a, b));
  }
  SpMat a(g.num_pressure_dofs(), g.num_pressure_dofs());
  a.setFromTriplets(trips.begin(), trips.end());
  return a;
}

PressureBcs PressureBcs::from_preset(const Grid& g, const Preset& p) {
  PressureBcs bc;
  bc.dirichlet = Eigen::VectorXd::Zero(g.num_pressure_dofs());
  std::vector<int> fixed;
  fixed.reserve(p.pressure_input_nodes.size() + p.pressure_zero_nodes.size());
  for (int n : p.pressure_input_nodes) {
    bc.dirichlet[g.pdof(n)] = p.p_in;
    fixed.push_back(g.pdof(n));
  }
  for (int n : p.pressure_zero_nodes) fixed.push_back(g.pdof(n));
  if (fixed.empty()) throw ConfigError("pressure solve: no pressure Dirichlet nodes set");
  bc.reducer = DofReducer::exclude(g.num_pressure_dofs(), fixed);
  return bc;
}

PressureSolveResult solve_pressure(const SpMat& a_full, const PressureBcs& bcs) {
  SpdSystem sys(a_full, bcs.reducer, "pressure solve");
  // A p = 0 with inhomogeneous Dirichlet data: rhs on free dofs is -A_fd p_d.
  const Eigen::VectorXd rhs_full = -(a_full * bcs.dirichlet);
  Eigen::VectorXd p = sys.solve(rhs_full, bcs.dirichlet);
  return {std::move(p), std::move(sys)};
}

Eigen::VectorXd nodal_loads(const SpMat& t_mat, const Eigen::VectorXd& p) {
  if (t_mat.cols() != p.size()) throw NumericalError("nodal_loads: dimension mismatch");
  return -(t_mat * p);
}

}  // namespace pacm
