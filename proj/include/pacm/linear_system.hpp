#pragma once

#include <memory>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "pacm/core.hpp"

namespace pacm {

using SpMat = Eigen::SparseMatrix<double>;

/// Symmetric Dirichlet elimination: maps a full symmetric system onto the
/// free-free block, keeping it SPD for direct factorization.
struct DofReducer {
  int n_full = 0;
  std::vector<int> red_of_full;  // -1 on eliminated dofs
  std::vector<int> full_of_red;

  static DofReducer exclude(int n_full, const std::vector<int>& fixed);

  int n_free() const { return static_cast<int>(full_of_red.size()); }

  SpMat reduce_matrix(const SpMat& a) const;
  Eigen::VectorXd restrict_vec(const Eigen::VectorXd& full) const;

  /// Scatter a free-dof vector back to full size; eliminated entries take
  /// their values from `dirichlet` (zero vector for homogeneous BCs).
  Eigen::VectorXd expand(const Eigen::VectorXd& red, const Eigen::VectorXd& dirichlet) const;
};

/// LDLT-factorized reduced SPD operator with residual-checked solves.
class SpdSystem {
public:
  SpdSystem(const SpMat& a_full, DofReducer reducer, const char* label);

  /// Solve A x = b (full-size rhs restricted to free dofs); returns the
  /// full-size solution with `dirichlet` values on eliminated dofs.
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs_full, const Eigen::VectorXd& dirichlet) const;

  /// Solve with homogeneous eliminated dofs.
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs_full) const;

  const DofReducer& reducer() const { return red_; }
  const SpMat& reduced_matrix() const { return a_red_; }

  /// Relative residual of the most recent solve.
  double last_residual() const { return last_residual_; }

private:
  DofReducer red_;
  SpMat a_red_;
  std::unique_ptr<Eigen::SimplicialLDLT<SpMat>> ldlt_;  // factorization is not movable
  std::string label_;
  mutable double last_residual_ = 0.0;
};

}  // namespace pacm
