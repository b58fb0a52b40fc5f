#pragma once

#include <Eigen/Dense>

#include "pacm/fields.hpp"
#include "pacm/linear_system.hpp"
#include "pacm/preset.hpp"

namespace pacm {

/// Parameters of the Darcy pressure model with drainage.
struct DarcyParams {
  double k_v = 1.0;        // void flow coefficient (m^4 N^-1 s^-1)
  double epsilon = 1e-7;   // flow contrast K_s / K_v
  double eta_kappa = 0.3;  // flow interpolation step position
  double beta_kappa = 10.0;
  double eta_d = 0.2;  // drainage step position
  double beta_d = 10.0;
  double r = 0.1;        // remainder of input pressure at penetration depth
  double delta_s = 0.0;  // penetration depth (m); must be set before use
  double p_ext = 0.0;

  double k_s() const { return epsilon * k_v; }
  double drain_solid() const {  // D_s = (ln r / delta_s)^2 * K_s
    const double c = std::log(r) / delta_s;
    return c * c * k_s();
  }
  void validate() const;
};

/// Normalized tanh step of the flow/drainage interpolations: H(0)=0, H(1)=1.
double smooth_step(double x, double beta, double eta);
double smooth_step_deriv(double x, double beta, double eta);

/// K(rho) = K_v (1 - (1-eps) H(rho, beta_k, eta_k)); decreasing in rho.
double flow_coefficient(double rho, const DarcyParams& p);
double flow_coefficient_deriv(double rho, const DarcyParams& p);

/// D(rho) = D_s H(rho, beta_d, eta_d); increasing in rho.
double drainage_coefficient(double rho, const DarcyParams& p);
double drainage_coefficient_deriv(double rho, const DarcyParams& p);

/// Nodal pressure field with the consistent structural load vector F = -T p.
struct PressureSolution {
  Eigen::VectorXd p;  // one per pressure dof
  Eigen::VectorXd f;  // one per displacement dof
  char realization = 'i';
};

/// Geometry-only element matrices and the assembled transformation matrix.
/// All integrals use 2x2 Gauss quadrature and carry the out-of-plane
/// thickness.
class DarcyOperator {
public:
  explicit DarcyOperator(const Grid& g);

  /// A = sum_e ( K Bp^T Bp + D Np^T Np ) integrated; full (unreduced), symmetric.
  SpMat assemble(const Grid& g, const Eigen::VectorXd& rho_bar, const DarcyParams& p) const;

  /// d A_e / d rho_e as a dense 4x4 for one element.
  Eigen::Matrix4d elem_matrix_deriv(double rho, const DarcyParams& p) const {
    return flow_coefficient_deriv(rho, p) * grad_ref_ + drainage_coefficient_deriv(rho, p) * mass_ref_;
  }
  Eigen::Matrix4d elem_matrix(double rho, const DarcyParams& p) const {
    return flow_coefficient(rho, p) * grad_ref_ + drainage_coefficient(rho, p) * mass_ref_;
  }

  const Eigen::Matrix4d& grad_ref() const { return grad_ref_; }   // t * int Bp^T Bp
  const Eigen::Matrix4d& mass_ref() const { return mass_ref_; }   // t * int Np^T Np
  const Eigen::Matrix<double, 8, 4>& coupling_ref() const { return coupling_ref_; }

  /// Global transformation matrix T = sum_e t*int Nu^T Bp (design independent).
  const SpMat& transformation() const { return t_mat_; }

private:
  Eigen::Matrix4d grad_ref_, mass_ref_;
  Eigen::Matrix<double, 8, 4> coupling_ref_;
  SpMat t_mat_;
};

/// Dirichlet data + reducer for the pressure system of one preset.
struct PressureBcs {
  Eigen::VectorXd dirichlet;  // full-size; zero on free dofs
  DofReducer reducer;

  static PressureBcs from_preset(const Grid& g, const Preset& p);
};

/// Solve A p = 0 subject to the Dirichlet data. Returns the factorized
/// system (reused for the load-sensitivity adjoint) and the full p.
struct PressureSolveResult {
  Eigen::VectorXd p;
  SpdSystem system;
};
PressureSolveResult solve_pressure(const SpMat& a_full, const PressureBcs& bcs);

/// F = -T p.
Eigen::VectorXd nodal_loads(const SpMat& t_mat, const Eigen::VectorXd& p);

}  // namespace pacm
