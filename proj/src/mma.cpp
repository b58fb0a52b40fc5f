#include "pacm/mma.hpp"

#include <cmath>

#include "pacm/core.hpp"

namespace pacm {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// State of the primal-dual interior point iteration.
struct IpState {
  VectorXd x, xsi, eta;  // size n
  VectorXd y, lam, mu, s;  // size m
  double z = 1.0, zet = 1.0;
};

struct Residual {
  double norm = 0.0, maxabs = 0.0;
};

// Residual of the KKT system at relaxation epsi.
Residual compute_residual(const IpState& st, double epsi, const VectorXd& low, const VectorXd& upp,
                          const VectorXd& alfa, const VectorXd& beta, const VectorXd& p0,
                          const VectorXd& q0, const MatrixXd& pmat, const MatrixXd& qmat,
                          double a0, const VectorXd& a, const VectorXd& b, const VectorXd& c,
                          const VectorXd& d) {
  const VectorXd ux1 = upp - st.x;
  const VectorXd xl1 = st.x - low;
  const VectorXd ux2 = ux1.cwiseProduct(ux1);
  const VectorXd xl2 = xl1.cwiseProduct(xl1);
  const VectorXd uxinv = ux1.cwiseInverse();
  const VectorXd xlinv = xl1.cwiseInverse();

  const VectorXd plam = p0 + pmat.transpose() * st.lam;
  const VectorXd qlam = q0 + qmat.transpose() * st.lam;
  const VectorXd gvec = pmat * uxinv + qmat * xlinv;
  const VectorXd dpsidx = plam.cwiseQuotient(ux2) - qlam.cwiseQuotient(xl2);

  const VectorXd rex = dpsidx - st.xsi + st.eta;
  const VectorXd rey = c + d.cwiseProduct(st.y) - st.mu - st.lam;
  const double rez = a0 - st.zet - a.dot(st.lam);
  const VectorXd relam = gvec - a * st.z - st.y + st.s - b;
  const VectorXd rexsi = (st.xsi.cwiseProduct(st.x - alfa).array() - epsi).matrix();
  const VectorXd reeta = (st.eta.cwiseProduct(beta - st.x).array() - epsi).matrix();
  const VectorXd remu = (st.mu.cwiseProduct(st.y).array() - epsi).matrix();
  const double rezet = st.zet * st.z - epsi;
  const VectorXd res = (st.lam.cwiseProduct(st.s).array() - epsi).matrix();

  Residual r;
  double sq = rez * rez + rezet * rezet;
  double mx = std::max(std::abs(rez), std::abs(rezet));
  for (const VectorXd* v : {&rex, &rey, &relam, &rexsi, &reeta, &remu, &res}) {
    sq += v->squaredNorm();
    mx = std::max(mx, v->cwiseAbs().maxCoeff());
  }
  r.norm = std::sqrt(sq);
  r.maxabs = mx;
  return r;
}

}  // namespace

Mma::Mma(int n, int m, Options opt) : n_(n), m_(m), opt_(opt) { reset(); }

void Mma::reset() {
  iter_ = 0;
  low_.setZero(n_);
  upp_.setZero(n_);
  xold1_.setZero(n_);
  xold2_.setZero(n_);
}

Eigen::VectorXd Mma::update(const VectorXd& x, const VectorXd& df0dx, const MatrixXd& dfdx,
                            const VectorXd& fval, const VectorXd& xmin, const VectorXd& xmax,
                            const VectorXd& a, const VectorXd& c, const VectorXd& d) {
  if (x.size() != n_ || dfdx.rows() != m_ || dfdx.cols() != n_ || fval.size() != m_)
    throw NumericalError("mma: inconsistent problem dimensions");
  ++iter_;

  // Asymptote update.
  if (iter_ < 3) {
    low_ = x - opt_.asyinit * (xmax - xmin);
    upp_ = x + opt_.asyinit * (xmax - xmin);
  } else {
    for (int i = 0; i < n_; ++i) {
      const double zz = (x[i] - xold1_[i]) * (xold1_[i] - xold2_[i]);
      double factor = 1.0;
      if (zz > 0.0) factor = opt_.asyincr;
      else if (zz < 0.0) factor = opt_.asydecr;
      low_[i] = x[i] - factor * (xold1_[i] - low_[i]);
      upp_[i] = x[i] + factor * (upp_[i] - xold1_[i]);
      const double range = xmax[i] - xmin[i];
      low_[i] = std::min(std::max(low_[i], x[i] - 10.0 * range), x[i] - 0.01 * range);
      upp_[i] = std::max(std::min(upp_[i], x[i] + 10.0 * range), x[i] + 0.01 * range);
    }
  }
  xold2_ = xold1_;
  xold1_ = x;

  // Inner bounds alfa, beta.
  VectorXd alfa(n_), beta(n_);
  for (int i = 0; i < n_; ++i) {
    alfa[i] = std::max({low_[i] + opt_.albefa * (x[i] - low_[i]),
                        x[i] - opt_.move * (xmax[i] - xmin[i]), xmin[i]});
    beta[i] = std::min({upp_[i] - opt_.albefa * (upp_[i] - x[i]),
                        x[i] + opt_.move * (xmax[i] - xmin[i]), xmax[i]});
  }

  // p/q coefficients of the separable approximations.
  VectorXd ux1 = upp_ - x, xl1 = x - low_;
  VectorXd ux2 = ux1.cwiseProduct(ux1), xl2 = xl1.cwiseProduct(xl1);
  VectorXd p0(n_), q0(n_);
  MatrixXd pmat(m_, n_), qmat(m_, n_);
  for (int i = 0; i < n_; ++i) {
    const double xmami = std::max(xmax[i] - xmin[i], 1e-5);
    {
      const double dfp = std::max(df0dx[i], 0.0);
      const double dfm = std::max(-df0dx[i], 0.0);
      const double pq = 0.001 * (dfp + dfm) + opt_.raa0 / xmami;
      p0[i] = (dfp + pq) * ux2[i];
      q0[i] = (dfm + pq) * xl2[i];
    }
    for (int j = 0; j < m_; ++j) {
      const double dfp = std::max(dfdx(j, i), 0.0);
      const double dfm = std::max(-dfdx(j, i), 0.0);
      const double pq = 0.001 * (dfp + dfm) + opt_.raa0 / xmami;
      pmat(j, i) = (dfp + pq) * ux2[i];
      qmat(j, i) = (dfm + pq) * xl2[i];
    }
  }
  const VectorXd b = pmat * ux1.cwiseInverse() + qmat * xl1.cwiseInverse() - fval;

  // ---- Subproblem: primal-dual Newton interior point (subsolv). ----
  IpState st;
  st.x = 0.5 * (alfa + beta);
  st.y.setOnes(m_);
  st.z = 1.0;
  st.lam.setOnes(m_);
  st.xsi = (st.x - alfa).cwiseInverse().cwiseMax(1.0);
  st.eta = (beta - st.x).cwiseInverse().cwiseMax(1.0);
  st.mu = (0.5 * c).cwiseMax(1.0);
  st.zet = 1.0;
  st.s.setOnes(m_);

  double epsi = 1.0;
  while (epsi > opt_.epsimin) {
    Residual res = compute_residual(st, epsi, low_, upp_, alfa, beta, p0, q0, pmat, qmat,
                                    opt_.a0, a, b, c, d);
    int ittt = 0;
    while (res.maxabs > 0.9 * epsi && ittt < 200) {
      ++ittt;
      const VectorXd ux1s = upp_ - st.x;
      const VectorXd xl1s = st.x - low_;
      const VectorXd ux2s = ux1s.cwiseProduct(ux1s);
      const VectorXd xl2s = xl1s.cwiseProduct(xl1s);
      const VectorXd ux3s = ux1s.cwiseProduct(ux2s);
      const VectorXd xl3s = xl1s.cwiseProduct(xl2s);
      const VectorXd uxinv1 = ux1s.cwiseInverse();
      const VectorXd xlinv1 = xl1s.cwiseInverse();
      const VectorXd uxinv2 = ux2s.cwiseInverse();
      const VectorXd xlinv2 = xl2s.cwiseInverse();

      const VectorXd plam = p0 + pmat.transpose() * st.lam;
      const VectorXd qlam = q0 + qmat.transpose() * st.lam;
      const VectorXd gvec = pmat * uxinv1 + qmat * xlinv1;
      // GG = P diag(uxinv2) - Q diag(xlinv2), m x n.
      MatrixXd gg(m_, n_);
      for (int j = 0; j < m_; ++j)
        for (int i = 0; i < n_; ++i) gg(j, i) = pmat(j, i) * uxinv2[i] - qmat(j, i) * xlinv2[i];

      const VectorXd dpsidx = plam.cwiseQuotient(ux2s) - qlam.cwiseQuotient(xl2s);
      const VectorXd delx =
          dpsidx - epsi * (st.x - alfa).cwiseInverse() + epsi * (beta - st.x).cwiseInverse();
      const VectorXd dely = c + d.cwiseProduct(st.y) - st.lam - epsi * st.y.cwiseInverse();
      const double delz = opt_.a0 - a.dot(st.lam) - epsi / st.z;
      const VectorXd dellam = gvec - a * st.z - st.y - b + epsi * st.lam.cwiseInverse();

      VectorXd diagx = 2.0 * (plam.cwiseQuotient(ux3s) + qlam.cwiseQuotient(xl3s));
      diagx += st.xsi.cwiseQuotient(st.x - alfa) + st.eta.cwiseQuotient(beta - st.x);
      const VectorXd diagxinv = diagx.cwiseInverse();
      const VectorXd diagy = d + st.mu.cwiseQuotient(st.y);
      const VectorXd diagyinv = diagy.cwiseInverse();
      const VectorXd diaglam = st.s.cwiseQuotient(st.lam);
      const VectorXd diaglamyi = diaglam + diagyinv;

      // m << n: condense onto (lam, z).
      const VectorXd blam = dellam + dely.cwiseQuotient(diagy) - gg * delx.cwiseQuotient(diagx);
      MatrixXd alam = gg * diagxinv.asDiagonal() * gg.transpose();
      alam.diagonal() += diaglamyi;
      MatrixXd aa(m_ + 1, m_ + 1);
      aa.topLeftCorner(m_, m_) = alam;
      aa.topRightCorner(m_, 1) = a;
      aa.bottomLeftCorner(1, m_) = a.transpose();
      aa(m_, m_) = -st.zet / st.z;
      VectorXd bb(m_ + 1);
      bb.head(m_) = blam;
      bb[m_] = delz;
      const VectorXd solut = aa.fullPivLu().solve(bb);
      const VectorXd dlam = solut.head(m_);
      const double dz = solut[m_];

      const VectorXd dx = -delx.cwiseQuotient(diagx) - (gg.transpose() * dlam).cwiseQuotient(diagx);
      const VectorXd dy = -dely.cwiseQuotient(diagy) + dlam.cwiseQuotient(diagy);
      const VectorXd dxsi = -st.xsi + (epsi - st.xsi.cwiseProduct(dx).array()).matrix().cwiseQuotient(st.x - alfa);
      const VectorXd deta = -st.eta + (epsi + st.eta.cwiseProduct(dx).array()).matrix().cwiseQuotient(beta - st.x);
      const VectorXd dmu = -st.mu + (epsi - st.mu.cwiseProduct(dy).array()).matrix().cwiseQuotient(st.y);
      const double dzet = -st.zet + (epsi - st.zet * dz) / st.z;
      const VectorXd ds = -st.s + (epsi - st.s.cwiseProduct(dlam).array()).matrix().cwiseQuotient(st.lam);

      // Largest step keeping all dual/slack variables positive.
      double stminv = 1.0;
      auto track = [&stminv](const VectorXd& dv, const VectorXd& v) {
        for (int i = 0; i < v.size(); ++i) stminv = std::max(stminv, -1.01 * dv[i] / v[i]);
      };
      track(dy, st.y);
      track(dlam, st.lam);
      track(dxsi, st.xsi);
      track(deta, st.eta);
      track(dmu, st.mu);
      track(ds, st.s);
      stminv = std::max(stminv, -1.01 * dz / st.z);
      stminv = std::max(stminv, -1.01 * dzet / st.zet);
      for (int i = 0; i < n_; ++i) {
        stminv = std::max(stminv, -1.01 * dx[i] / (st.x[i] - alfa[i]));
        stminv = std::max(stminv, 1.01 * dx[i] / (beta[i] - st.x[i]));
      }
      double steg = 1.0 / stminv;

      const IpState old = st;
      Residual resnew;
      int itto = 0;
      do {
        st.x = old.x + steg * dx;
        st.y = old.y + steg * dy;
        st.z = old.z + steg * dz;
        st.lam = old.lam + steg * dlam;
        st.xsi = old.xsi + steg * dxsi;
        st.eta = old.eta + steg * deta;
        st.mu = old.mu + steg * dmu;
        st.zet = old.zet + steg * dzet;
        st.s = old.s + steg * ds;
        resnew = compute_residual(st, epsi, low_, upp_, alfa, beta, p0, q0, pmat, qmat,
                                  opt_.a0, a, b, c, d);
        steg *= 0.5;
        ++itto;
      } while (resnew.norm > res.norm && itto < 50);
      res = resnew;
    }
    epsi *= 0.1;
  }

  z_ = st.z;
  y_ = st.y;
  lam_ = st.lam;
  return st.x;
}

}  // namespace pacm
