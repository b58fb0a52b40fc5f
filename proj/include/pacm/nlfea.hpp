#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "pacm/linear_system.hpp"
#include "pacm/preset.hpp"

namespace pacm {

struct HyperelasticParams {
  double shear_g = 0.0;      // G (N/m^2)
  double lame_lambda = 0.0;  // lambda (N/m^2)

  /// G = E/(2(1+nu)), lambda = 2 G nu / (1 - 2 nu).
  static HyperelasticParams from_linear(double e, double nu);
};

/// Neo-Hookean strain energy density W(F); throws NumericalError on J <= 0.
double strain_energy(const Eigen::Matrix3d& f, const HyperelasticParams& m);

/// Cauchy stress sigma(F) = (G/J)(F F^T - I) + (lambda/J) ln(J) I.
Eigen::Matrix3d cauchy_stress(const Eigen::Matrix3d& f, const HyperelasticParams& m);

/// Out-of-plane stretch enforcing sigma_33 = 0 for given in-plane J.
double plane_stress_stretch(double j2d, const HyperelasticParams& m);

/// Quad mesh carved out of the structured grid by density thresholding.
struct SubMesh {
  std::vector<double> xs, ys;
  std::vector<std::array<int, 4>> conn;
  std::vector<int> orig_node;           // submesh node -> grid node
  std::vector<int> orig_elem;           // submesh element -> grid element
  std::vector<int> node_map;            // grid node -> submesh node (-1 absent)
  int num_nodes() const { return static_cast<int>(xs.size()); }
  int num_elems() const { return static_cast<int>(conn.size()); }
};

/// Keep elements with cell density >= threshold.
SubMesh extract_submesh(const Grid& g, const Eigen::VectorXd& cell_field, double threshold);

/// Pressurized boundary chain: node pairs oriented with solid on the left,
/// so the outward normal e3 x t pushes into the structure.
struct FollowerBoundary {
  std::vector<std::array<int, 2>> edges;  // submesh node ids
};

/// Boundary edges wetted by the inlet: edges facing void cells reachable
/// from the pressure-input side plus solid faces lying on the inlet edges.
FollowerBoundary detect_wetted_boundary(const Grid& g, const Eigen::VectorXd& cell_field,
                                        double threshold, const std::vector<EdgeId>& input_edges,
                                        const SubMesh& sub);

struct NlModel {
  SubMesh mesh;
  HyperelasticParams mat;
  double thickness = 1e-3;
  std::vector<int> fixed_dofs;  // submesh displacement dofs
  int output_dof = -1;          // submesh displacement dof (-1: none)
  double spring_stiffness = 0.0;
  FollowerBoundary boundary;
};

/// Extract the design at `threshold`, transfer supports/symmetry/spring from
/// the preset, drop islands not connected to any support, and detect the
/// pressurized boundary.
NlModel build_nl_model(const Problem& prob, const Eigen::VectorXd& rho_phys, double threshold,
                       double e_solid, double nu);

/// Internal force F_int(u) (plane-stress neo-Hookean, exact gradient of the
/// total strain energy). Throws NumericalError when an element inverts.
Eigen::VectorXd internal_force(const NlModel& m, const Eigen::VectorXd& u);

/// Total strain energy at u (N*m).
double total_strain_energy(const NlModel& m, const Eigen::VectorXd& u);

/// Consistent tangent dF_int/du (symmetric; excludes spring and follower terms).
SpMat internal_tangent(const NlModel& m, const Eigen::VectorXd& u);

/// Follower pressure load on the deformed boundary and its (unsymmetric)
/// tangent dF_ext/du.
void follower_load(const NlModel& m, const Eigen::VectorXd& u, double pressure,
                   Eigen::VectorXd& f_ext, SpMat* k_ext);

struct NewtonOptions {
  int max_newton = 50;
  double tol = 1e-8;          // ||R|| / ||F_ext||
  int max_halvings = 4;
  bool use_follower_tangent = true;
};

struct LoadStep {
  double pressure = 0.0;
  Eigen::VectorXd u;
  double output_disp = 0.0;
  int newton_iters = 0;
};

struct NlResult {
  std::vector<LoadStep> steps;  // accepted steps, ascending pressure
  bool converged = false;       // reached the target pressure
  std::string message;
};

/// Incremental Newton-Raphson with adaptive step halving on divergence.
NlResult newton_solve(const NlModel& m, double p_target, int n_steps, NewtonOptions opt = {});

/// Small-strain reference: linear plane-stress solve on the same submesh with
/// the follower load evaluated at u = 0. Returns the output displacement.
double linear_output_displacement(const NlModel& m, double pressure, double e_solid, double nu);

}  // namespace pacm
