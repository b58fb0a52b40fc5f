#pragma once

// Shared test utilities: deterministic RNG, finite-difference oracles, the
// end-to-end objective pipeline used for adjoint verification, mesh
// permutation helpers and a minimal legacy-VTK reader.

#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <vector>

#include "pacm/config.hpp"
#include "pacm/optimizer.hpp"
#include "pacm/sensitivity.hpp"

namespace pacm::test {

inline std::mt19937& rng(unsigned seed = 0) {
  static std::mt19937 gen(12345);
  if (seed != 0) gen.seed(seed);
  return gen;
}

inline Eigen::VectorXd random_vector(int n, double lo, double hi, unsigned seed = 0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  auto& gen = rng(seed);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = dist(gen);
  return v;
}

/// Everything needed to evaluate f0(rho) end to end for one projection
/// threshold; the independent path for adjoint finite differencing.
struct Pipeline {
  Problem prob;
  DensityFilter filter;
  DarcyOperator darcy;
  ElasticOperator elas;
  DarcyParams dp;
  double mu;

  Pipeline(RunConfig cfg)
      : prob(cfg.make_problem()),
        filter(DensityFilter::build(prob.grid, cfg.rfill.absolute(prob.grid))),
        darcy(prob.grid),
        elas(prob.grid, cfg.material()),
        dp(cfg.darcy_params(prob.grid)),
        mu(cfg.mu) {}

  Eigen::VectorXd physical(const Eigen::VectorXd& rho, double beta, double eta) const {
    DesignState st = make_design_state(rho, filter, beta, 0.0, prob.preset);
    Eigen::VectorXd bar = project(st.rho_tilde, beta, eta);
    for (int e : prob.preset.passive_solid_elems) bar[e] = 1.0;
    for (int e : prob.preset.passive_void_elems) bar[e] = 0.0;
    return bar;
  }

  double f0(const Eigen::VectorXd& rho, double beta, double eta) const {
    const Eigen::VectorXd bar = physical(rho, beta, eta);
    return evaluate_realization(prob.grid, prob.preset, darcy, elas, dp, bar, mu, false).f0;
  }

  /// Adjoint gradient d f0 / d rho (design vector), optionally without the
  /// load-sensitivity term.
  Eigen::VectorXd gradient(const Eigen::VectorXd& rho, double beta, double eta,
                           bool with_load_sensitivity = true) const {
    const Eigen::VectorXd bar = physical(rho, beta, eta);
    RealizationResult r = evaluate_realization(prob.grid, prob.preset, darcy, elas, dp, bar, mu,
                                               true, with_load_sensitivity);
    DesignState st = make_design_state(rho, filter, beta, 0.0, prob.preset);
    return backprop(r.dfdrho_bar, st.rho_tilde, beta, eta, filter);
  }

  /// Central finite difference of f0 over every design element. The base
  /// step balances the linear-solve roundoff floor (which scales as 1/h and
  /// dominates below h ~ 1e-5 for this functional) against truncation, and
  /// the h, h/2 Richardson combination removes the leading h^2 term at the
  /// steep beta = 8 projections.
  Eigen::VectorXd fd_gradient(const Eigen::VectorXd& rho, double beta, double eta,
                              double step = 1e-4) const {
    Eigen::VectorXd g(rho.size());
    Eigen::VectorXd r = rho;
    auto central = [&](int e, double h) {
      const double x0 = r[e];
      r[e] = x0 + h;
      const double fp = f0(r, beta, eta);
      r[e] = x0 - h;
      const double fm = f0(r, beta, eta);
      r[e] = x0;
      return (fp - fm) / (2.0 * h);
    };
    for (int e = 0; e < rho.size(); ++e) {
      const double d1 = central(e, step);
      const double d2 = central(e, 0.5 * step);
      g[e] = (4.0 * d2 - d1) / 3.0;
    }
    return g;
  }
};

inline RunConfig small_inverter_config(int nex, int ney) {
  RunConfig cfg;
  cfg.preset = PresetKind::Inverter;
  cfg.nex = nex;
  cfg.ney = ney;
  cfg.rfill = {true, 1.6};
  cfg.validate();
  return cfg;
}

/// Max relative error between two gradients over entries that matter.
inline double max_rel_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                            double floor_frac = 1e-12) {
  const double scale = std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
  double worst = 0.0;
  for (int i = 0; i < a.size(); ++i) {
    if (std::abs(b[i]) <= floor_frac * scale) continue;
    worst = std::max(worst, std::abs(a[i] - b[i]) / std::abs(b[i]));
  }
  return worst;
}

/// Apply a random node permutation to a grid (preset ids must be remapped by
/// the caller). DOF maps stay canonical over the new ids.
inline Grid permute_grid(const Grid& g, const std::vector<int>& new_of_old) {
  Grid out = g;
  for (int n = 0; n < g.num_nodes(); ++n) {
    out.node_x[new_of_old[n]] = g.node_x[n];
    out.node_y[new_of_old[n]] = g.node_y[n];
  }
  for (int e = 0; e < g.num_elems(); ++e)
    for (int a = 0; a < 4; ++a) out.conn[e][a] = new_of_old[g.conn[e][a]];
  return out;
}

struct VtkData {
  std::vector<std::array<double, 3>> points;
  std::map<std::string, std::vector<double>> cell_scalars;
  std::map<std::string, std::vector<double>> point_scalars;
  std::map<std::string, std::vector<std::array<double, 3>>> point_vectors;
};

/// Minimal reader for the legacy-ASCII files this project writes.
inline VtkData read_vtk(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  VtkData d;
  std::string tok;
  long ncell = 0, npoint = 0;
  enum { kNone, kCell, kPoint } section = kNone;
  while (in >> tok) {
    if (tok == "POINTS") {
      long n;
      std::string type;
      in >> n >> type;
      d.points.resize(n);
      for (long i = 0; i < n; ++i) in >> d.points[i][0] >> d.points[i][1] >> d.points[i][2];
    } else if (tok == "CELL_DATA") {
      in >> ncell;
      section = kCell;
    } else if (tok == "POINT_DATA") {
      in >> npoint;
      section = kPoint;
    } else if (tok == "SCALARS") {
      std::string name, type;
      int comps;
      in >> name >> type >> comps;
      in >> tok >> tok;  // LOOKUP_TABLE default
      const long n = section == kCell ? ncell : npoint;
      std::vector<double> vals(n);
      for (long i = 0; i < n; ++i) in >> vals[i];
      (section == kCell ? d.cell_scalars : d.point_scalars)[name] = std::move(vals);
    } else if (tok == "VECTORS") {
      std::string name, type;
      in >> name >> type;
      std::vector<std::array<double, 3>> vals(npoint);
      for (long i = 0; i < npoint; ++i) in >> vals[i][0] >> vals[i][1] >> vals[i][2];
      d.point_vectors[name] = std::move(vals);
    }
  }
  return d;
}

}  // namespace pacm::test
