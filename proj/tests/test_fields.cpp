#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "pacm/fields.hpp"

using namespace pacm;
using pacm::test::random_vector;

TEST_CASE("projection fixed point and identity limit") {
  CHECK(project(0.5, 8.0, 0.5) == doctest::Approx(0.5));
  for (double x : {0.1, 0.37, 0.9}) CHECK(project(x, 0.0, 0.5) == doctest::Approx(x));
  // Direct evaluation oracle at beta=8, eta=0.5, x=0.6.
  const double expect = (std::tanh(4.0) + std::tanh(0.8)) / (2.0 * std::tanh(4.0));
  CHECK(project(0.6, 8.0, 0.5) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("projection preserves [0,1], endpoints exact, monotone") {
  for (double beta : {1.0, 8.0, 64.0}) {
    for (double eta : {0.35, 0.5, 0.65}) {
      CHECK(project(0.0, beta, eta) == doctest::Approx(0.0).epsilon(1e-14));
      CHECK(project(1.0, beta, eta) == doctest::Approx(1.0).epsilon(1e-14));
      double prev = -1.0;
      for (int k = 0; k <= 50; ++k) {
        const double v = project(k / 50.0, beta, eta);
        CHECK(v >= prev);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        prev = v;
      }
    }
  }
  // Non-increasing in eta (drives the three-field ordering).
  for (double x : {0.2, 0.5, 0.8})
    CHECK(project(x, 8.0, 0.65) <= project(x, 8.0, 0.35));
}

TEST_CASE("projection derivative matches finite differences") {
  for (double beta : {0.5, 8.0}) {
    for (double x : {0.1, 0.4, 0.55, 0.9}) {
      const double h = 1e-7;
      const double fd = (project(x + h, beta, 0.5) - project(x - h, beta, 0.5)) / (2 * h);
      CHECK(project_deriv(x, beta, 0.5) == doctest::Approx(fd).epsilon(1e-7));
    }
  }
}

TEST_CASE("filter degenerates to identity below element size") {
  const Grid g = build_grid(6, 3, 0.6, 0.3, 1e-3);
  const DensityFilter f = DensityFilter::build(g, 0.5 * g.min_elem_size());
  CHECK(f.is_identity());
  const Eigen::VectorXd rho = random_vector(g.num_elems(), 0.0, 1.0, 11);
  CHECK((f.apply(rho) - rho).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("filter conserves uniform fields and bounds the result") {
  const Grid g = build_grid(12, 7, 0.24, 0.14, 1e-3);
  const DensityFilter f = DensityFilter::build(g, 2.7 * g.min_elem_size());
  const Eigen::VectorXd c = Eigen::VectorXd::Constant(g.num_elems(), 0.37);
  CHECK((f.apply(c) - c).cwiseAbs().maxCoeff() < 1e-14);

  const Eigen::VectorXd rho = random_vector(g.num_elems(), 0.0, 1.0, 21);
  const Eigen::VectorXd ft = f.apply(rho);
  CHECK(ft.minCoeff() >= rho.minCoeff() - 1e-14);
  CHECK(ft.maxCoeff() <= rho.maxCoeff() + 1e-14);
}

TEST_CASE("filter weights on a three-element row") {
  // r_fill = 1.5 h: neighbor weight 1 - h/(1.5h) = 1/3 before normalization.
  const Grid g = build_grid(3, 1, 0.3, 0.1, 1e-3);
  const DensityFilter f = DensityFilter::build(g, 1.5 * 0.1);
  Eigen::VectorXd rho = Eigen::VectorXd::Zero(3);
  rho[1] = 1.0;
  const Eigen::VectorXd ft = f.apply(rho);
  CHECK(ft[1] == doctest::Approx(1.0 / (1.0 + 2.0 / 3.0)));
  // Row with only one neighbor: weights (1, 1/3).
  CHECK(ft[0] == doctest::Approx((1.0 / 3.0) / (1.0 + 1.0 / 3.0)));
}

TEST_CASE("realize_three ordering and degenerate delta_eta") {
  const Eigen::VectorXd rt = random_vector(200, 0.0, 1.0, 31);
  Eigen::VectorXd e, i, d;
  realize_three(rt, 8.0, 0.0, e, i, d);
  CHECK((e - i).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  CHECK((d - i).cwiseAbs().maxCoeff() == doctest::Approx(0.0));

  for (double de : {0.05, 0.15}) {
    realize_three(rt, 8.0, de, e, i, d);
    for (int k = 0; k < rt.size(); ++k) {
      CHECK(e[k] <= i[k] + 1e-15);
      CHECK(i[k] <= d[k] + 1e-15);
    }
    CHECK(e.sum() <= i.sum());
    CHECK(i.sum() <= d.sum());
  }
}

TEST_CASE("realize_three saturates at high beta") {
  Eigen::VectorXd rt(1);
  rt[0] = 0.6;
  Eigen::VectorXd e, i, d;
  realize_three(rt, 128.0, 0.15, e, i, d);
  CHECK(e[0] == doctest::Approx(0.0).epsilon(1e-4));  // 0.6 < eta_e = 0.65
  CHECK(i[0] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(d[0] == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("backprop identity limit") {
  const Grid g = build_grid(5, 2, 0.5, 0.2, 1e-3);
  const DensityFilter f = DensityFilter::build(g, 0.4 * g.min_elem_size());  // identity
  const Eigen::VectorXd up = random_vector(g.num_elems(), -1.0, 1.0, 41);
  const Eigen::VectorXd rt = random_vector(g.num_elems(), 0.0, 1.0, 42);
  const Eigen::VectorXd out = backprop(up, rt, 0.0, 0.5, f);
  CHECK((out - up).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("backprop equals finite difference of the filtered-projected functional") {
  const Grid g = build_grid(6, 3, 0.6, 0.3, 1e-3);
  const DensityFilter f = DensityFilter::build(g, 2.2 * g.min_elem_size());
  const Eigen::VectorXd w = random_vector(g.num_elems(), 0.5, 1.5, 51);
  Eigen::VectorXd rho = random_vector(g.num_elems(), 0.1, 0.9, 52);
  const double beta = 4.0, eta = 0.45;

  auto functional = [&](const Eigen::VectorXd& r) {
    const Eigen::VectorXd bar = project(f.apply(r), beta, eta);
    return 0.5 * bar.cwiseProduct(bar).dot(w);
  };
  // Upstream gradient df/drho_bar = w .* rho_bar.
  const Eigen::VectorXd bar = project(f.apply(rho), beta, eta);
  const Eigen::VectorXd grad = backprop(w.cwiseProduct(bar), f.apply(rho), beta, eta, f);

  const double h = 1e-7;
  for (int k = 0; k < rho.size(); ++k) {
    const double x0 = rho[k];
    rho[k] = x0 + h;
    const double fp = functional(rho);
    rho[k] = x0 - h;
    const double fm = functional(rho);
    rho[k] = x0;
    const double fd = (fp - fm) / (2 * h);
    CHECK(grad[k] == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("backprop is the exact adjoint of the linearized forward map") {
  const Grid g = build_grid(9, 5, 0.9, 0.5, 1e-3);
  const DensityFilter f = DensityFilter::build(g, 2.4 * g.min_elem_size());
  const Eigen::VectorXd rho = random_vector(g.num_elems(), 0.05, 0.95, 61);
  const Eigen::VectorXd rt = f.apply(rho);
  const double beta = 6.0, eta = 0.55;

  for (int rep = 0; rep < 5; ++rep) {
    const Eigen::VectorXd drho = random_vector(g.num_elems(), -1.0, 1.0, 0);
    const Eigen::VectorXd gvec = random_vector(g.num_elems(), -1.0, 1.0, 0);
    // Forward: J drho = P'(rt) .* (W drho).
    Eigen::VectorXd jd = f.apply(drho);
    for (int k = 0; k < jd.size(); ++k) jd[k] *= project_deriv(rt[k], beta, eta);
    const double lhs = jd.dot(gvec);
    const double rhs = drho.dot(backprop(gvec, rt, beta, eta, f));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("backprop of zero upstream gradient is zero") {
  const Grid g = build_grid(4, 2, 0.4, 0.2, 1e-3);
  const DensityFilter f = DensityFilter::build(g, 1.8 * g.min_elem_size());
  const Eigen::VectorXd z = Eigen::VectorXd::Zero(g.num_elems());
  CHECK(backprop(z, random_vector(g.num_elems(), 0.0, 1.0, 71), 3.0, 0.5, f).norm() == 0.0);
}

TEST_CASE("gray indicator endpoints") {
  Eigen::VectorXd binary(6);
  binary << 0, 1, 1, 0, 1, 0;
  CHECK(gray_indicator(binary) == doctest::Approx(0.0));
  CHECK(gray_indicator(Eigen::VectorXd::Constant(9, 0.5)) == doctest::Approx(1.0));
}

TEST_CASE("passive elements are pinned in all fields but filter into neighbors") {
  RunConfig cfg;
  cfg.preset = PresetKind::Gripper;
  cfg.nex = 40;
  cfg.ney = 20;
  cfg.rfill = {true, 2.5};
  const Problem prob = cfg.make_problem();
  const DensityFilter f = DensityFilter::build(prob.grid, cfg.rfill.absolute(prob.grid));
  const Eigen::VectorXd rho = Eigen::VectorXd::Constant(prob.grid.num_elems(), 0.4);
  const DesignState st = make_design_state(rho, f, 8.0, 0.1, prob.preset);
  for (int e : prob.preset.passive_solid_elems) {
    CHECK(st.rho[e] == 1.0);
    CHECK(st.rho_e[e] == 1.0);
    CHECK(st.rho_i[e] == 1.0);
    CHECK(st.rho_d[e] == 1.0);
  }
  for (int e : prob.preset.passive_void_elems) {
    CHECK(st.rho[e] == 0.0);
    CHECK(st.rho_d[e] == 0.0);
  }
  // The design element sitting on top of the strip's left end sees the
  // passive solid through the filter: filtered value above the background.
  const int probe = prob.preset.passive_solid_elems.front() + prob.grid.nex;
  CHECK(st.rho_tilde[probe] > 0.4);
}
