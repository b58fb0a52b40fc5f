#pragma once

#include <Eigen/Dense>

#include "pacm/linear_system.hpp"
#include "pacm/preset.hpp"

namespace pacm {

struct MaterialParams {
  double e1 = 3e9;        // solid Young's modulus (N/m^2)
  double e0_ratio = 1e-6; // E0 / E1
  double nu = 0.40;
  double zeta = 3.0;      // SIMP penalty
  double thickness = 1e-3;

  double e0() const { return e0_ratio * e1; }
  void validate() const;
};

/// Modified SIMP: E = E0 + rho^zeta (E1 - E0).
double simp_modulus(double rho, const MaterialParams& m);
double simp_modulus_deriv(double rho, const MaterialParams& m);

/// Plane-stress Q4 stiffness for unit Young's modulus, 2x2 Gauss.
Eigen::Matrix<double, 8, 8> unit_element_stiffness(double dx, double dy, double nu, double t);

/// Linear SIMP-interpolated elasticity on the canonical grid with the
/// output spring folded into the stiffness.
class ElasticOperator {
public:
  ElasticOperator(const Grid& g, const MaterialParams& m);

  /// Full (unreduced) global stiffness including the spring term.
  SpMat assemble(const Grid& g, const Eigen::VectorXd& rho_bar, const Preset& preset) const;

  const Eigen::Matrix<double, 8, 8>& unit_ke() const { return ke_unit_; }
  const MaterialParams& material() const { return mat_; }

private:
  Eigen::Matrix<double, 8, 8> ke_unit_;
  MaterialParams mat_;
};

struct ElasticSolution {
  Eigen::VectorXd u;  // state displacement
  Eigen::VectorXd v;  // dummy-load displacement
  double se = 0.0;    // strain energy 0.5 u^T K u
  double mse = 0.0;   // mutual strain energy v^T K u
  double delta = 0.0; // output displacement (m)
};

/// Factorize K once and solve the state and dummy systems.
/// F is the full-size pressure load vector; the dummy load is the preset's
/// signed point load at the output DOF.
ElasticSolution solve_elasticity(const SpMat& k_full, const Grid& g, const Preset& preset,
                                 const Eigen::VectorXd& f);

/// As above but exposes the factorized system for adjoint reuse.
struct ElasticSolveResult {
  ElasticSolution sol;
  SpdSystem system;
};
ElasticSolveResult solve_elasticity_keep(const SpMat& k_full, const Grid& g, const Preset& preset,
                                         const Eigen::VectorXd& f);

}  // namespace pacm
