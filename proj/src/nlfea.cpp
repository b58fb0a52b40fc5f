#include "pacm/nlfea.hpp"

#include <cmath>
#include <deque>

#include <Eigen/SparseLU>

#include "pacm/elasticity.hpp"

namespace pacm {

namespace {
const double kGauss = 1.0 / std::sqrt(3.0);

void shape_grad_ref(double xi, double eta, double dxi[4], double deta[4]) {
  dxi[0] = -0.25 * (1 - eta); dxi[1] = 0.25 * (1 - eta);
  dxi[2] = 0.25 * (1 + eta);  dxi[3] = -0.25 * (1 + eta);
  deta[0] = -0.25 * (1 - xi); deta[1] = -0.25 * (1 + xi);
  deta[2] = 0.25 * (1 + xi);  deta[3] = 0.25 * (1 - xi);
}
}  // namespace

HyperelasticParams HyperelasticParams::from_linear(double e, double nu) {
  HyperelasticParams m;
  m.shear_g = e / (2.0 * (1.0 + nu));
  m.lame_lambda = 2.0 * m.shear_g * nu / (1.0 - 2.0 * nu);
  return m;
}

double strain_energy(const Eigen::Matrix3d& f, const HyperelasticParams& m) {
  const double j = f.determinant();
  if (j <= 0.0) throw NumericalError("strain_energy: element inversion (J <= 0)");
  const double lnj = std::log(j);
  return 0.5 * m.shear_g * ((f * f.transpose()).trace() - 3.0 - 2.0 * lnj) +
         0.5 * m.lame_lambda * lnj * lnj;
}

Eigen::Matrix3d cauchy_stress(const Eigen::Matrix3d& f, const HyperelasticParams& m) {
  const double j = f.determinant();
  if (j <= 0.0) throw NumericalError("cauchy_stress: element inversion (J <= 0)");
  const double lnj = std::log(j);
  return (m.shear_g / j) * (f * f.transpose() - Eigen::Matrix3d::Identity()) +
         (m.lame_lambda / j) * lnj * Eigen::Matrix3d::Identity();
}

double plane_stress_stretch(double j2d, const HyperelasticParams& m) {
  if (j2d <= 0.0) throw NumericalError("plane_stress_stretch: in-plane inversion");
  // Solve G(l^2 - 1) + lambda ln(j2d l) = 0; strictly increasing in l.
  double l = 1.0 / std::sqrt(j2d);
  if (!(l > 0.0) || !std::isfinite(l)) l = 1.0;
  for (int it = 0; it < 60; ++it) {
    const double g = m.shear_g * (l * l - 1.0) + m.lame_lambda * std::log(j2d * l);
    const double dg = 2.0 * m.shear_g * l + m.lame_lambda / l;
    double step = g / dg;
    double l_new = l - step;
    while (l_new <= 0.0) {
      step *= 0.5;
      l_new = l - step;
    }
    const bool done = std::abs(l_new - l) <= 1e-15 * l;
    l = l_new;
    if (done) break;
  }
  return l;
}

SubMesh extract_submesh(const Grid& g, const Eigen::VectorXd& cell_field, double threshold) {
  if (cell_field.size() != g.num_elems())
    throw ConfigError("extract_submesh: field size does not match element count");
  SubMesh s;
  s.node_map.assign(g.num_nodes(), -1);
  for (int e = 0; e < g.num_elems(); ++e) {
    if (cell_field[e] < threshold) continue;
    std::array<int, 4> c{};
    for (int a = 0; a < 4; ++a) {
      const int n = g.conn[e][a];
      if (s.node_map[n] < 0) {
        s.node_map[n] = s.num_nodes();
        s.xs.push_back(g.node_x[n]);
        s.ys.push_back(g.node_y[n]);
        s.orig_node.push_back(n);
      }
      c[a] = s.node_map[n];
    }
    s.conn.push_back(c);
    s.orig_elem.push_back(e);
  }
  return s;
}

FollowerBoundary detect_wetted_boundary(const Grid& g, const Eigen::VectorXd& cell_field,
                                        double threshold, const std::vector<EdgeId>& input_edges,
                                        const SubMesh& sub) {
  auto kept = [&](int ix, int iy) { return cell_field[g.elem_id(ix, iy)] >= threshold; };
  auto on_input = [&](EdgeId e) {
    return std::find(input_edges.begin(), input_edges.end(), e) != input_edges.end();
  };

  // Flood-fill void cells from the inlet sides.
  std::vector<char> wet(static_cast<size_t>(g.num_elems()), 0);
  std::deque<std::pair<int, int>> frontier;
  auto seed = [&](int ix, int iy) {
    if (!kept(ix, iy) && !wet[g.elem_id(ix, iy)]) {
      wet[g.elem_id(ix, iy)] = 1;
      frontier.emplace_back(ix, iy);
    }
  };
  if (on_input(EdgeId::Left))
    for (int iy = 0; iy < g.ney; ++iy) seed(0, iy);
  if (on_input(EdgeId::Right))
    for (int iy = 0; iy < g.ney; ++iy) seed(g.nex - 1, iy);
  if (on_input(EdgeId::Bottom))
    for (int ix = 0; ix < g.nex; ++ix) seed(ix, 0);
  if (on_input(EdgeId::Top))
    for (int ix = 0; ix < g.nex; ++ix) seed(ix, g.ney - 1);
  while (!frontier.empty()) {
    const auto [ix, iy] = frontier.front();
    frontier.pop_front();
    if (ix > 0) seed(ix - 1, iy);
    if (ix + 1 < g.nex) seed(ix + 1, iy);
    if (iy > 0) seed(ix, iy - 1);
    if (iy + 1 < g.ney) seed(ix, iy + 1);
  }

  // Element edges in CCW order: (c0,c1) bottom, (c1,c2) right, (c2,c3) top,
  // (c3,c0) left. CCW keeps the solid on the left of each edge.
  FollowerBoundary fb;
  for (int iy = 0; iy < g.ney; ++iy) {
    for (int ix = 0; ix < g.nex; ++ix) {
      if (!kept(ix, iy)) continue;
      const int e = g.elem_id(ix, iy);
      const auto& c = g.conn[e];
      struct Side {
        int a, b;       // conn slots
        int nx, ny;     // neighbor cell offset
        EdgeId domain;  // domain edge when the neighbor is outside
      };
      const Side sides[4] = {{0, 1, 0, -1, EdgeId::Bottom},
                             {1, 2, +1, 0, EdgeId::Right},
                             {2, 3, 0, +1, EdgeId::Top},
                             {3, 0, -1, 0, EdgeId::Left}};
      for (const auto& sd : sides) {
        const int jx = ix + sd.nx, jy = iy + sd.ny;
        bool wetted = false;
        if (jx < 0 || jy < 0 || jx >= g.nex || jy >= g.ney) {
          wetted = on_input(sd.domain);
        } else if (!kept(jx, jy)) {
          wetted = wet[g.elem_id(jx, jy)] != 0;
        }
        if (!wetted) continue;
        const int n0 = sub.node_map[c[sd.a]];
        const int n1 = sub.node_map[c[sd.b]];
        if (n0 < 0 || n1 < 0) continue;  // element not in the submesh
        fb.edges.push_back({n0, n1});
      }
    }
  }
  return fb;
}

NlModel build_nl_model(const Problem& prob, const Eigen::VectorXd& rho_phys, double threshold,
                       double e_solid, double nu) {
  const Grid& g = prob.grid;
  const Preset& preset = prob.preset;

  SubMesh sub = extract_submesh(g, rho_phys, threshold);
  if (sub.num_elems() == 0)
    throw NumericalError("nlfea: no elements above the extraction threshold");

  // Drop components not connected to any supported node.
  {
    std::vector<std::vector<int>> elems_of_node(sub.num_nodes());
    for (int e = 0; e < sub.num_elems(); ++e)
      for (int a = 0; a < 4; ++a) elems_of_node[sub.conn[e][a]].push_back(e);
    std::vector<char> node_fixed(sub.num_nodes(), 0);
    for (int d : preset.fixed_dofs) {
      const int n = d / 2;
      if (sub.node_map[n] >= 0) node_fixed[sub.node_map[n]] = 1;
    }
    std::vector<char> elem_keep(sub.num_elems(), 0);
    std::deque<int> q;
    for (int e = 0; e < sub.num_elems(); ++e)
      for (int a = 0; a < 4; ++a)
        if (node_fixed[sub.conn[e][a]] && !elem_keep[e]) {
          elem_keep[e] = 1;
          q.push_back(e);
        }
    while (!q.empty()) {
      const int e = q.front();
      q.pop_front();
      for (int a = 0; a < 4; ++a)
        for (int e2 : elems_of_node[sub.conn[e][a]])
          if (!elem_keep[e2]) {
            elem_keep[e2] = 1;
            q.push_back(e2);
          }
    }
    bool all = true;
    for (char k : elem_keep) all = all && k;
    if (!all) {
      Eigen::VectorXd pruned = Eigen::VectorXd::Zero(g.num_elems());
      for (int e = 0; e < sub.num_elems(); ++e)
        if (elem_keep[e]) pruned[sub.orig_elem[e]] = 1.0;
      sub = extract_submesh(g, pruned, 0.5);
    }
  }

  NlModel m;
  m.mat = HyperelasticParams::from_linear(e_solid, nu);
  m.thickness = g.thickness;

  for (int d : preset.fixed_dofs) {
    const int n = d / 2, comp = d % 2;
    if (sub.node_map[n] >= 0) m.fixed_dofs.push_back(2 * sub.node_map[n] + comp);
  }

  const int out_sub = sub.node_map[preset.output_node];
  if (out_sub < 0)
    throw NumericalError("nlfea: extracted design does not contain the output node");
  m.output_dof = 2 * out_sub + preset.output_comp;
  m.spring_stiffness = preset.spring_stiffness;

  m.boundary = detect_wetted_boundary(g, rho_phys, threshold, preset.input_edges, sub);
  m.mesh = std::move(sub);
  return m;
}

namespace {

// Per-Gauss-point plane-stress state used by both force and tangent loops.
struct GpState {
  Eigen::Matrix2d f, finv_t, p2d;
  double lnj = 0.0;   // ln(j2d * l3)
  double omega = 0.0; // d(ln J)/d(ln J2d) at sigma33 = 0
};

GpState gp_state(const Eigen::Matrix2d& f, const HyperelasticParams& m) {
  GpState s;
  s.f = f;
  const double j2d = f.determinant();
  if (j2d <= 0.0) throw NumericalError("nlfea: element inversion (J2d <= 0)");
  const double l3 = plane_stress_stretch(j2d, m);
  s.lnj = std::log(j2d * l3);
  Eigen::Matrix2d finv;
  finv << f(1, 1), -f(0, 1), -f(1, 0), f(0, 0);
  finv /= j2d;
  s.finv_t = finv.transpose();
  s.p2d = m.shear_g * f - (m.shear_g - m.lame_lambda * s.lnj) * s.finv_t;
  const double gl2 = 2.0 * m.shear_g * l3 * l3;
  s.omega = gl2 / (gl2 + m.lame_lambda);
  return s;
}

template <typename PerGp>
void integrate_elements(const NlModel& m, const Eigen::VectorXd& u, PerGp&& per_gp) {
  const auto& mesh = m.mesh;
  for (int e = 0; e < mesh.num_elems(); ++e) {
    const auto& c = mesh.conn[e];
    Eigen::Matrix<double, 4, 2> xe, ue;
    for (int a = 0; a < 4; ++a) {
      xe(a, 0) = mesh.xs[c[a]];
      xe(a, 1) = mesh.ys[c[a]];
      ue(a, 0) = u[2 * c[a]];
      ue(a, 1) = u[2 * c[a] + 1];
    }
    for (int gx = 0; gx < 2; ++gx) {
      for (int gy = 0; gy < 2; ++gy) {
        const double xi = (gx == 0 ? -kGauss : kGauss);
        const double eta = (gy == 0 ? -kGauss : kGauss);
        double dxi[4], deta[4];
        shape_grad_ref(xi, eta, dxi, deta);
        Eigen::Matrix2d jac = Eigen::Matrix2d::Zero();
        for (int a = 0; a < 4; ++a) {
          jac(0, 0) += dxi[a] * xe(a, 0);
          jac(0, 1) += dxi[a] * xe(a, 1);
          jac(1, 0) += deta[a] * xe(a, 0);
          jac(1, 1) += deta[a] * xe(a, 1);
        }
        const double detj = jac.determinant();
        if (detj <= 0.0) throw NumericalError("nlfea: degenerate reference element");
        const Eigen::Matrix2d jinv = jac.inverse();
        Eigen::Matrix<double, 4, 2> gref;  // dN_a/dX = J^{-1} dN_a/dxi
        for (int a = 0; a < 4; ++a) {
          const Eigen::Vector2d gx = jinv * Eigen::Vector2d(dxi[a], deta[a]);
          gref(a, 0) = gx[0];
          gref(a, 1) = gx[1];
        }
        Eigen::Matrix2d f = Eigen::Matrix2d::Identity();
        for (int a = 0; a < 4; ++a) f += ue.row(a).transpose() * gref.row(a);
        per_gp(e, c, gref, f, detj * m.thickness);
      }
    }
  }
}

}  // namespace

Eigen::VectorXd internal_force(const NlModel& m, const Eigen::VectorXd& u) {
  Eigen::VectorXd fint = Eigen::VectorXd::Zero(2 * m.mesh.num_nodes());
  integrate_elements(m, u,
                     [&](int, const std::array<int, 4>& c, const Eigen::Matrix<double, 4, 2>& gref,
                         const Eigen::Matrix2d& f, double w) {
                       const GpState s = gp_state(f, m.mat);
                       for (int a = 0; a < 4; ++a) {
                         const Eigen::Vector2d fa = s.p2d * gref.row(a).transpose() * w;
                         fint[2 * c[a]] += fa[0];
                         fint[2 * c[a] + 1] += fa[1];
                       }
                     });
  return fint;
}

double total_strain_energy(const NlModel& m, const Eigen::VectorXd& u) {
  double w_total = 0.0;
  integrate_elements(m, u,
                     [&](int, const std::array<int, 4>&, const Eigen::Matrix<double, 4, 2>&,
                         const Eigen::Matrix2d& f, double w) {
                       const double j2d = f.determinant();
                       if (j2d <= 0.0) throw NumericalError("nlfea: element inversion");
                       const double l3 = plane_stress_stretch(j2d, m.mat);
                       Eigen::Matrix3d f3 = Eigen::Matrix3d::Zero();
                       f3.topLeftCorner<2, 2>() = f;
                       f3(2, 2) = l3;
                       w_total += strain_energy(f3, m.mat) * w;
                     });
  return w_total;
}

SpMat internal_tangent(const NlModel& m, const Eigen::VectorXd& u) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(m.mesh.num_elems()) * 64);
  integrate_elements(
      m, u,
      [&](int, const std::array<int, 4>& c, const Eigen::Matrix<double, 4, 2>& gref,
          const Eigen::Matrix2d& f, double w) {
        const GpState s = gp_state(f, m.mat);
        const double c1 = m.mat.shear_g;
        const double c2 = m.mat.shear_g - m.mat.lame_lambda * s.lnj;
        const double c3 = m.mat.lame_lambda * s.omega;
        Eigen::Matrix<double, 4, 2> mv;  // m_a = F^{-T} dN_a/dX
        for (int a = 0; a < 4; ++a) mv.row(a) = (s.finv_t * gref.row(a).transpose()).transpose();
        for (int a = 0; a < 4; ++a) {
          for (int b = 0; b < 4; ++b) {
            const double gab = gref.row(a).dot(gref.row(b));
            Eigen::Matrix2d blk = c2 * mv.row(b).transpose() * mv.row(a) +
                                  c3 * mv.row(a).transpose() * mv.row(b);
            blk(0, 0) += c1 * gab;
            blk(1, 1) += c1 * gab;
            blk *= w;
            for (int i = 0; i < 2; ++i)
              for (int k = 0; k < 2; ++k)
                trips.emplace_back(2 * c[a] + i, 2 * c[b] + k, blk(i, k));
          }
        }
      });
  SpMat k(2 * m.mesh.num_nodes(), 2 * m.mesh.num_nodes());
  k.setFromTriplets(trips.begin(), trips.end());
  return k;
}

void follower_load(const NlModel& m, const Eigen::VectorXd& u, double pressure,
                   Eigen::VectorXd& f_ext, SpMat* k_ext) {
  const int ndof = 2 * m.mesh.num_nodes();
  f_ext = Eigen::VectorXd::Zero(ndof);
  std::vector<Eigen::Triplet<double>> trips;
  const double pt2 = 0.5 * pressure * m.thickness;
  for (const auto& ed : m.boundary.edges) {
    const int n0 = ed[0], n1 = ed[1];
    const double x0 = m.mesh.xs[n0] + u[2 * n0], y0 = m.mesh.ys[n0] + u[2 * n0 + 1];
    const double x1 = m.mesh.xs[n1] + u[2 * n1], y1 = m.mesh.ys[n1] + u[2 * n1 + 1];
    const double ex = x1 - x0, ey = y1 - y0;
    if (ex * ex + ey * ey <= 1e-30)
      throw NumericalError("follower_load: degenerate deformed edge");
    // n dl = e3 x (x1 - x0); total p*t*l*n split equally between the nodes.
    const double fx = pt2 * (-ey), fy = pt2 * ex;
    f_ext[2 * n0] += fx;
    f_ext[2 * n0 + 1] += fy;
    f_ext[2 * n1] += fx;
    f_ext[2 * n1 + 1] += fy;
    if (k_ext) {
      // d(e3 x (x1-x0)) = e3 x (du1 - du0); exact, no quadrature needed.
      for (const int row : {2 * n0, 2 * n1}) {
        trips.emplace_back(row, 2 * n1 + 1, -pt2);
        trips.emplace_back(row, 2 * n0 + 1, pt2);
        trips.emplace_back(row + 1, 2 * n1, pt2);
        trips.emplace_back(row + 1, 2 * n0, -pt2);
      }
    }
  }
  if (k_ext) {
    k_ext->resize(ndof, ndof);
    k_ext->setFromTriplets(trips.begin(), trips.end());
  }
}

namespace {

struct StepOutcome {
  bool ok = false;
  Eigen::VectorXd u;
  int iters = 0;
};

StepOutcome newton_step(const NlModel& m, const Eigen::VectorXd& u0, double pressure,
                        const NewtonOptions& opt, const DofReducer& red) {
  StepOutcome out;
  Eigen::VectorXd u = u0;
  try {
    for (int it = 1; it <= opt.max_newton; ++it) {
      Eigen::VectorXd f_ext;
      SpMat k_ext;
      follower_load(m, u, pressure, f_ext, opt.use_follower_tangent ? &k_ext : nullptr);
      Eigen::VectorXd r = internal_force(m, u) - f_ext;
      if (m.output_dof >= 0 && m.spring_stiffness > 0.0)
        r[m.output_dof] += m.spring_stiffness * u[m.output_dof];

      const double ref = std::max(red.restrict_vec(f_ext).norm(), 1e-30);
      const double rnorm = red.restrict_vec(r).norm();
      if (!std::isfinite(rnorm)) return out;
      if (rnorm <= opt.tol * ref || (pressure == 0.0 && rnorm <= 1e-14)) {
        out.ok = true;
        out.u = u;
        out.iters = it;
        return out;
      }

      SpMat kt = internal_tangent(m, u);
      if (opt.use_follower_tangent) kt = kt - k_ext;
      if (m.output_dof >= 0 && m.spring_stiffness > 0.0)
        kt.coeffRef(m.output_dof, m.output_dof) += m.spring_stiffness;

      const SpMat kt_red = red.reduce_matrix(kt);
      Eigen::SparseLU<SpMat> lu(kt_red);
      if (lu.info() != Eigen::Success) return out;
      const Eigen::VectorXd du_red = lu.solve(-red.restrict_vec(r));
      if (!du_red.allFinite()) return out;
      u = red.expand(du_red + red.restrict_vec(u), Eigen::VectorXd::Zero(u.size()));
    }
  } catch (const NumericalError&) {
    return out;  // inversion during assembly: reject the step
  }
  return out;
}

}  // namespace

NlResult newton_solve(const NlModel& m, double p_target, int n_steps, NewtonOptions opt) {
  if (p_target < 0.0 || n_steps < 1)
    throw ConfigError("newton_solve: target pressure must be >= 0 and n_steps >= 1");
  const int ndof = 2 * m.mesh.num_nodes();
  const DofReducer red = DofReducer::exclude(ndof, m.fixed_dofs);

  NlResult res;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(ndof);

  if (p_target == 0.0) {
    const StepOutcome so = newton_step(m, u, 0.0, opt, red);
    res.converged = so.ok;
    res.steps.push_back({0.0, u, m.output_dof >= 0 ? u[m.output_dof] : 0.0, so.iters});
    return res;
  }

  double p_cur = 0.0;
  double dp = p_target / n_steps;
  int halvings = 0;
  while (p_cur < p_target * (1.0 - 1e-12)) {
    const double p_try = std::min(p_cur + dp, p_target);
    const StepOutcome so = newton_step(m, u, p_try, opt, red);
    if (so.ok) {
      u = so.u;
      p_cur = p_try;
      res.steps.push_back({p_cur, u, m.output_dof >= 0 ? u[m.output_dof] : 0.0, so.iters});
    } else {
      if (++halvings > opt.max_halvings) {
        res.converged = false;
        res.message = "newton_solve: no convergence at p = " + std::to_string(p_try) +
                      " after " + std::to_string(opt.max_halvings) + " step halvings";
        return res;
      }
      dp *= 0.5;
    }
  }
  res.converged = true;
  return res;
}

double linear_output_displacement(const NlModel& m, double pressure, double e_solid, double nu) {
  if (m.mesh.num_elems() == 0) throw NumericalError("linear solve: empty mesh");
  // Submesh elements are uniform grid rectangles.
  const auto& c0 = m.mesh.conn[0];
  const double dx = std::abs(m.mesh.xs[c0[1]] - m.mesh.xs[c0[0]]);
  const double dy = std::abs(m.mesh.ys[c0[3]] - m.mesh.ys[c0[0]]);
  const Eigen::Matrix<double, 8, 8> ke = e_solid * unit_element_stiffness(dx, dy, nu, m.thickness);

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(m.mesh.num_elems()) * 64);
  for (int e = 0; e < m.mesh.num_elems(); ++e) {
    const auto& c = m.mesh.conn[e];
    int dofs[8];
    for (int a = 0; a < 4; ++a) {
      dofs[2 * a] = 2 * c[a];
      dofs[2 * a + 1] = 2 * c[a] + 1;
    }
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) trips.emplace_back(dofs[i], dofs[j], ke(i, j));
  }
  const int ndof = 2 * m.mesh.num_nodes();
  if (m.output_dof >= 0 && m.spring_stiffness > 0.0)
    trips.emplace_back(m.output_dof, m.output_dof, m.spring_stiffness);
  SpMat k(ndof, ndof);
  k.setFromTriplets(trips.begin(), trips.end());

  Eigen::VectorXd f_ext;
  follower_load(m, Eigen::VectorXd::Zero(ndof), pressure, f_ext, nullptr);
  SpdSystem sys(k, DofReducer::exclude(ndof, m.fixed_dofs), "linear verification solve");
  const Eigen::VectorXd u = sys.solve(f_ext);
  return m.output_dof >= 0 ? u[m.output_dof] : 0.0;
}

}  // namespace pacm
