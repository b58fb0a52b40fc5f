#pragma once

#include <vector>

#include <Eigen/Core>

#include "pacm/grid.hpp"
#include "pacm/preset.hpp"

namespace pacm {

/// Smoothed-Heaviside projection
///   rho_bar = [tanh(beta*eta) + tanh(beta*(x-eta))] / [tanh(beta*eta) + tanh(beta*(1-eta))]
/// and its derivative with respect to x. beta -> 0 degenerates to identity.
double project(double x, double beta, double eta);
double project_deriv(double x, double beta, double eta);

Eigen::VectorXd project(const Eigen::VectorXd& x, double beta, double eta);

/// Linear-hat density filter with volume-weighted row normalization.
/// Weights are precomputed on the (static) grid.
class DensityFilter {
public:
  static DensityFilter build(const Grid& g, double r_fill);

  Eigen::VectorXd apply(const Eigen::VectorXd& rho) const;

  /// Exact adjoint of apply (transpose of the normalized weight matrix).
  Eigen::VectorXd apply_transpose(const Eigen::VectorXd& g) const;

  bool is_identity() const { return identity_warning_; }
  double radius() const { return r_fill_; }

private:
  int n_ = 0;
  double r_fill_ = 0.0;
  bool identity_warning_ = false;  // r_fill below element size
  std::vector<int> offsets_, cols_;
  std::vector<double> weights_;  // normalized: row sums are 1
};

/// Design parameterization state: design vector, filtered field and the
/// eroded / intermediate / dilated physical fields.
struct DesignState {
  Eigen::VectorXd rho;        // design vector, passive entries held at 0/1
  Eigen::VectorXd rho_tilde;  // filtered
  Eigen::VectorXd rho_e, rho_i, rho_d;
  double beta = 1.0;
  double delta_eta = 0.0;
};

/// Thresholds: eroded 0.5+delta_eta, intermediate 0.5, dilated 0.5-delta_eta.
void realize_three(const Eigen::VectorXd& rho_tilde, double beta, double delta_eta,
                   Eigen::VectorXd& rho_e, Eigen::VectorXd& rho_i, Eigen::VectorXd& rho_d);

/// Filter + three-way projection with passive forcing (passive solids pinned
/// to 1, voids to 0 in rho and in every physical field).
DesignState make_design_state(Eigen::VectorXd rho, const DensityFilter& filter, double beta,
                              double delta_eta, const Preset& preset);

/// Chain rule back to the design vector:
///   df/drho = W^T (df/drho_bar .* d rho_bar/d rho_tilde)
Eigen::VectorXd backprop(const Eigen::VectorXd& df_drho_bar, const Eigen::VectorXd& rho_tilde,
                         double beta, double eta, const DensityFilter& filter);

/// Gray-scale indicator M_nd = sum 4*rho*(1-rho) / n_e.
double gray_indicator(const Eigen::VectorXd& rho_bar);

/// Zero the passive entries of a per-element field (in place).
void mask_passive(Eigen::VectorXd& field, const Preset& preset);

}  // namespace pacm
