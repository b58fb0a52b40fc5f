#include "pacm/fields.hpp"

#include <cmath>

namespace pacm {

namespace {
constexpr double kBetaTiny = 1e-12;
}

double project(double x, double beta, double eta) {
  if (beta < kBetaTiny) return x;
  const double denom = std::tanh(beta * eta) + std::tanh(beta * (1.0 - eta));
  return (std::tanh(beta * eta) + std::tanh(beta * (x - eta))) / denom;
}

double project_deriv(double x, double beta, double eta) {
  if (beta < kBetaTiny) return 1.0;
  const double denom = std::tanh(beta * eta) + std::tanh(beta * (1.0 - eta));
  const double th = std::tanh(beta * (x - eta));
  return beta * (1.0 - th * th) / denom;
}

Eigen::VectorXd project(const Eigen::VectorXd& x, double beta, double eta) {
  Eigen::VectorXd out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = project(x[i], beta, eta);
  return out;
}

DensityFilter DensityFilter::build(const Grid& g, double r_fill) {
  if (r_fill <= 0.0) throw ConfigError("filter radius must be positive");
  DensityFilter f;
  f.n_ = g.num_elems();
  f.r_fill_ = r_fill;
  f.identity_warning_ = r_fill < g.min_elem_size();

  const int rx = static_cast<int>(std::ceil(r_fill / g.dx));
  const int ry = static_cast<int>(std::ceil(r_fill / g.dy));
  const double vol = g.dx * g.dy;  // uniform grid

  f.offsets_.reserve(f.n_ + 1);
  f.offsets_.push_back(0);
  for (int iy = 0; iy < g.ney; ++iy) {
    for (int ix = 0; ix < g.nex; ++ix) {
      double wsum = 0.0;
      const size_t row_start = f.cols_.size();
      for (int jy = std::max(0, iy - ry); jy <= std::min(g.ney - 1, iy + ry); ++jy) {
        for (int jx = std::max(0, ix - rx); jx <= std::min(g.nex - 1, ix + rx); ++jx) {
          const double d = std::hypot((jx - ix) * g.dx, (jy - iy) * g.dy);
          const double w = 1.0 - d / r_fill;
          if (w <= 0.0) continue;
          f.cols_.push_back(g.elem_id(jx, jy));
          f.weights_.push_back(vol * w);
          wsum += vol * w;
        }
      }
      for (size_t k = row_start; k < f.weights_.size(); ++k) f.weights_[k] /= wsum;
      f.offsets_.push_back(static_cast<int>(f.cols_.size()));
    }
  }
  return f;
}

Eigen::VectorXd DensityFilter::apply(const Eigen::VectorXd& rho) const {
  Eigen::VectorXd out(n_);
  for (int i = 0; i < n_; ++i) {
    double s = 0.0;
    for (int k = offsets_[i]; k < offsets_[i + 1]; ++k) s += weights_[k] * rho[cols_[k]];
    out[i] = s;
  }
  return out;
}

Eigen::VectorXd DensityFilter::apply_transpose(const Eigen::VectorXd& g) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n_);
  for (int i = 0; i < n_; ++i) {
    for (int k = offsets_[i]; k < offsets_[i + 1]; ++k) out[cols_[k]] += weights_[k] * g[i];
  }
  return out;
}

void realize_three(const Eigen::VectorXd& rho_tilde, double beta, double delta_eta,
                   Eigen::VectorXd& rho_e, Eigen::VectorXd& rho_i, Eigen::VectorXd& rho_d) {
  if (delta_eta < 0.0 || delta_eta > 0.5)
    throw ConfigError("delta_eta must lie in [0, 0.5]");
  rho_e = project(rho_tilde, beta, 0.5 + delta_eta);
  rho_i = project(rho_tilde, beta, 0.5);
  rho_d = project(rho_tilde, beta, 0.5 - delta_eta);
}

void mask_passive(Eigen::VectorXd& field, const Preset& preset) {
  for (int e : preset.passive_solid_elems) field[e] = 0.0;
  for (int e : preset.passive_void_elems) field[e] = 0.0;
}

namespace {
void force_passive(Eigen::VectorXd& field, const Preset& preset) {
  for (int e : preset.passive_solid_elems) field[e] = 1.0;
  for (int e : preset.passive_void_elems) field[e] = 0.0;
}
}  // namespace

DesignState make_design_state(Eigen::VectorXd rho, const DensityFilter& filter, double beta,
                              double delta_eta, const Preset& preset) {
  DesignState s;
  force_passive(rho, preset);
  s.rho = std::move(rho);
  s.rho_tilde = filter.apply(s.rho);
  realize_three(s.rho_tilde, beta, delta_eta, s.rho_e, s.rho_i, s.rho_d);
  force_passive(s.rho_e, preset);
  force_passive(s.rho_i, preset);
  force_passive(s.rho_d, preset);
  s.beta = beta;
  s.delta_eta = delta_eta;
  return s;
}

Eigen::VectorXd backprop(const Eigen::VectorXd& df_drho_bar, const Eigen::VectorXd& rho_tilde,
                         double beta, double eta, const DensityFilter& filter) {
  Eigen::VectorXd slope(rho_tilde.size());
  for (Eigen::Index i = 0; i < rho_tilde.size(); ++i)
    slope[i] = df_drho_bar[i] * project_deriv(rho_tilde[i], beta, eta);
  return filter.apply_transpose(slope);
}

double gray_indicator(const Eigen::VectorXd& rho_bar) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < rho_bar.size(); ++i) s += 4.0 * rho_bar[i] * (1.0 - rho_bar[i]);
  return s / static_cast<double>(rho_bar.size());
}

}  // namespace pacm
