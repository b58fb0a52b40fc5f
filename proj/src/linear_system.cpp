#include "pacm/linear_system.hpp"

namespace pacm {

DofReducer DofReducer::exclude(int n_full, const std::vector<int>& fixed) {
  DofReducer r;
  r.n_full = n_full;
  r.red_of_full.assign(n_full, 0);
  for (int d : fixed) {
    if (d < 0 || d >= n_full) throw ConfigError("fixed dof id out of range");
    r.red_of_full[d] = -1;
  }
  r.full_of_red.reserve(n_full);
  for (int i = 0; i < n_full; ++i) {
    if (r.red_of_full[i] == 0) {
      r.red_of_full[i] = static_cast<int>(r.full_of_red.size());
      r.full_of_red.push_back(i);
    }
  }
  return r;
}

SpMat DofReducer::reduce_matrix(const SpMat& a) const {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(a.nonZeros());
  for (int k = 0; k < a.outerSize(); ++k) {
    for (SpMat::InnerIterator it(a, k); it; ++it) {
      const int i = red_of_full[it.row()];
      const int j = red_of_full[it.col()];
      if (i >= 0 && j >= 0) trips.emplace_back(i, j, it.value());
    }
  }
  SpMat out(n_free(), n_free());
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

Eigen::VectorXd DofReducer::restrict_vec(const Eigen::VectorXd& full) const {
  Eigen::VectorXd out(n_free());
  for (int i = 0; i < n_free(); ++i) out[i] = full[full_of_red[i]];
  return out;
}

Eigen::VectorXd DofReducer::expand(const Eigen::VectorXd& red, const Eigen::VectorXd& dirichlet) const {
  Eigen::VectorXd out = dirichlet;
  for (int i = 0; i < n_free(); ++i) out[full_of_red[i]] = red[i];
  return out;
}

SpdSystem::SpdSystem(const SpMat& a_full, DofReducer reducer, const char* label)
    : red_(std::move(reducer)), label_(label) {
  a_red_ = red_.reduce_matrix(a_full);
  ldlt_ = std::make_unique<Eigen::SimplicialLDLT<SpMat>>();
  ldlt_->compute(a_red_);
  if (ldlt_->info() != Eigen::Success)
    throw ConfigError(label_ + ": factorization failed (singular or indefinite system)");
}

Eigen::VectorXd SpdSystem::solve(const Eigen::VectorXd& rhs_full, const Eigen::VectorXd& dirichlet) const {
  const Eigen::VectorXd b = red_.restrict_vec(rhs_full);
  Eigen::VectorXd x = ldlt_->solve(b);
  const double bn = b.norm();
  // Two rounds of iterative refinement keep the residual near machine level
  // even with the 1e-6 stiffness contrast of near-void designs.
  for (int round = 0; round < 2; ++round) {
    const Eigen::VectorXd r = b - a_red_ * x;
    last_residual_ = bn > 0.0 ? r.norm() / bn : r.norm();
    if (last_residual_ < 1e-14) break;
    x += ldlt_->solve(r);
  }
  {
    const Eigen::VectorXd r = b - a_red_ * x;
    last_residual_ = bn > 0.0 ? r.norm() / bn : r.norm();
  }
  if (!x.allFinite() || last_residual_ > 1e-10)
    throw NumericalError(label_ + ": solve residual " + std::to_string(last_residual_) +
                         " exceeds 1e-10");
  return red_.expand(x, dirichlet);
}

Eigen::VectorXd SpdSystem::solve(const Eigen::VectorXd& rhs_full) const {
  return solve(rhs_full, Eigen::VectorXd::Zero(red_.n_full));
}

}  // namespace pacm
