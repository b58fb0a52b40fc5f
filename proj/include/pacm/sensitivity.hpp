#pragma once

#include "pacm/darcy.hpp"
#include "pacm/elasticity.hpp"
#include "pacm/fields.hpp"

namespace pacm {

/// Multi-criteria mechanism objective f0 = -mu * MSE / SE.
double objective(double mse, double se, double mu);

/// Objective sensitivity (elementwise):
///   Theta1_e = mu * u_e^T dKe/drho ( -u_e MSE / (2 SE^2) + v_e / SE )
Eigen::VectorXd objective_sensitivity(const Grid& g, const ElasticOperator& elas,
                                      const Eigen::VectorXd& rho_bar, const Eigen::VectorXd& u,
                                      const Eigen::VectorXd& v, double mse, double se, double mu);

/// Load sensitivity via the pressure adjoint:
///   A lambda2 = -T^T lambda1,  Theta2_e = lambda2_e^T dAe/drho p_e
/// with lambda1 = mu (v / SE - u MSE / SE^2) zero-padded on fixed dofs.
Eigen::VectorXd load_sensitivity(const Grid& g, const DarcyOperator& darcy,
                                 const DarcyParams& dp, const Eigen::VectorXd& rho_bar,
                                 const Eigen::VectorXd& p, const SpdSystem& pressure_system,
                                 const Eigen::VectorXd& lambda1);

/// Volume of a physical field and its (constant) derivative.
struct VolumeResult {
  double volume;          // sum V_m rho_m (m^2, area basis)
  double fraction;        // volume / (lx*ly)
  Eigen::VectorXd dv;     // dV/drho_m = V_m
};
VolumeResult volume_and_sensitivity(const Eigen::VectorXd& rho_bar, const Grid& g);

/// Full pipeline for one physical realization: pressure solve, loads, state
/// and dummy solves, objective, and (optionally) dL/drho_bar = Theta1+Theta2
/// with passive elements masked.
struct RealizationResult {
  PressureSolution pressure;
  ElasticSolution elastic;
  double f0 = 0.0;
  Eigen::VectorXd dfdrho_bar;  // empty when gradients were not requested
};

RealizationResult evaluate_realization(const Grid& g, const Preset& preset,
                                       const DarcyOperator& darcy, const ElasticOperator& elas,
                                       const DarcyParams& dp, const Eigen::VectorXd& rho_bar,
                                       double mu, bool with_gradient,
                                       bool with_load_sensitivity = true);

}  // namespace pacm
