#pragma once

#include <Eigen/Dense>

namespace pacm {

/// Method of Moving Asymptotes (Svanberg 1987) with the standard bound
/// formulation: minimize f0(x) + a0 z + sum(c_i y_i + 0.5 d_i y_i^2)
/// subject to f_i(x) - a_i z - y_i <= 0, per-iteration box bounds, y >= 0,
/// z >= 0. Min-max problems set a_i = 1 on the objective rows.
///
/// The subproblem is solved by the primal-dual Newton interior-point method
/// of the reference implementation.
class Mma {
public:
  struct Options {
    double asyinit = 0.5;
    double asyincr = 1.2;
    double asydecr = 0.7;
    double albefa = 0.1;
    double move = 0.5;  // internal move factor, on top of external bounds
    double raa0 = 1e-5;
    double epsimin = 1e-7;
    double a0 = 1.0;
  };

  Mma(int n, int m) : Mma(n, m, Options()) {}
  Mma(int n, int m, Options opt);

  /// One MMA design update. dfdx is m x n (one row per constraint), fval the
  /// corresponding constraint values; df0dx may be zero for pure min-max.
  /// xmin/xmax are the already move-limited per-iteration bounds.
  Eigen::VectorXd update(const Eigen::VectorXd& x, const Eigen::VectorXd& df0dx,
                         const Eigen::MatrixXd& dfdx, const Eigen::VectorXd& fval,
                         const Eigen::VectorXd& xmin, const Eigen::VectorXd& xmax,
                         const Eigen::VectorXd& a, const Eigen::VectorXd& c,
                         const Eigen::VectorXd& d);

  void reset();

  // Subproblem solution details of the last update.
  double last_z() const { return z_; }
  const Eigen::VectorXd& last_y() const { return y_; }
  const Eigen::VectorXd& last_lambda() const { return lam_; }
  const Eigen::VectorXd& asymptote_low() const { return low_; }
  const Eigen::VectorXd& asymptote_upp() const { return upp_; }

private:
  int n_, m_;
  Options opt_;
  int iter_ = 0;
  Eigen::VectorXd low_, upp_, xold1_, xold2_;
  double z_ = 0.0;
  Eigen::VectorXd y_, lam_;
};

}  // namespace pacm
