#pragma once

// Homogeneous self-dual interior-point method with Nesterov-Todd scaling and
// a Mehrotra predictor-corrector, for problems in the ConicProblem form.
// Free variables are split into differences of nonnegatives.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dtafopt/conic/problem.hpp"

namespace dtafopt::conic {

enum class SolveStatus { Optimal, PrimalInfeasible, DualInfeasible, Stall };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::PrimalInfeasible: return "primal_infeasible";
    case SolveStatus::DualInfeasible: return "dual_infeasible";
    case SolveStatus::Stall: return "stall";
  }
  return "?";
}

struct SolverOptions {
  int max_iterations = 200;
  double tolerance = 1e-7;
  double step_fraction = 0.98;
  double regularization = 1e-9;
  double warm_blend = 0.1;
  bool verbose = false;
};

// Optimal: x, y, s approximate a primal-dual solution.
// PrimalInfeasible: y is a ray with b'y = 1 and -A'y in the dual cone; s = -A'y.
// DualInfeasible: x is a ray with c'x = -1 and Ax = 0.
struct SolveOutcome {
  SolveStatus status = SolveStatus::Stall;
  std::vector<double> x, y, s;
  double primal_objective = std::numeric_limits<double>::quiet_NaN();
  double dual_objective = std::numeric_limits<double>::quiet_NaN();
  double primal_residual = std::numeric_limits<double>::infinity();
  double dual_residual = std::numeric_limits<double>::infinity();
  double gap = std::numeric_limits<double>::infinity();
  int iterations = 0;
  std::string message;
};

struct WarmStart {
  std::vector<double> x, y, s;
};

namespace detail {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Idx = Eigen::Index;

struct SymEntry {
  int p, q;  // p <= q
  double v;  // matrix entry A(p,q) = A(q,p)
};

struct Point {
  Vec lp;
  std::vector<Mat> psd;

  double dot(const Point& o) const {
    double r = lp.dot(o.lp);
    for (std::size_t b = 0; b < psd.size(); ++b) r += psd[b].cwiseProduct(o.psd[b]).sum();
    return r;
  }
  void axpy(double a, const Point& o) {
    lp += a * o.lp;
    for (std::size_t b = 0; b < psd.size(); ++b) psd[b] += a * o.psd[b];
  }
  Point scaled(double a) const {
    Point r = *this;
    r.lp *= a;
    for (auto& m : r.psd) m *= a;
    return r;
  }
  double norm() const { return std::sqrt(dot(*this)); }
};

struct VarLoc {
  int kind = 0;  // 0 lp nonneg, 1 lp free, 2 psd
  int a = -1;    // lp index (plus part) or psd block
  int minus = -1;
  int p = 0, q = 0;
};

struct Model {
  int m = 0;
  int n_lp = 0;
  std::vector<std::vector<std::pair<int, double>>> lp_cols;
  std::vector<int> dims;
  std::vector<std::vector<std::pair<int, std::vector<SymEntry>>>> psd_rows;
  Point c;
  Vec b;
  std::vector<VarLoc> loc;
  std::vector<double> row_scale;  // internal row = original row / scale
  std::vector<std::size_t> rows;  // original row per internal row

  double nu() const {
    double v = n_lp;
    for (int d : dims) v += d;
    return v;
  }

  Point zero() const {
    Point z;
    z.lp = Vec::Zero(n_lp);
    for (int d : dims) z.psd.push_back(Mat::Zero(d, d));
    return z;
  }

  Point identity() const {
    Point z;
    z.lp = Vec::Ones(n_lp);
    for (int d : dims) z.psd.push_back(Mat::Identity(d, d));
    return z;
  }

  Vec apply_A(const Point& x) const {
    Vec out = Vec::Zero(m);
    for (int k = 0; k < n_lp; ++k)
      for (const auto& [r, v] : lp_cols[k]) out[r] += v * x.lp[k];
    for (std::size_t bk = 0; bk < dims.size(); ++bk) {
      const Mat& X = x.psd[bk];
      for (const auto& [r, es] : psd_rows[bk]) {
        double s = 0.0;
        for (const auto& e : es) s += (e.p == e.q ? 1.0 : 2.0) * e.v * X(e.p, e.q);
        out[r] += s;
      }
    }
    return out;
  }

  Point apply_At(const Vec& y) const {
    Point out = zero();
    for (int k = 0; k < n_lp; ++k) {
      double s = 0.0;
      for (const auto& [r, v] : lp_cols[k]) s += v * y[r];
      out.lp[k] = s;
    }
    for (std::size_t bk = 0; bk < dims.size(); ++bk) {
      Mat& M = out.psd[bk];
      for (const auto& [r, es] : psd_rows[bk]) {
        const double yr = y[r];
        for (const auto& e : es) {
          M(e.p, e.q) += yr * e.v;
          if (e.p != e.q) M(e.q, e.p) += yr * e.v;
        }
      }
    }
    return out;
  }
};

inline Model build_model(const ConicProblem& prob, const std::vector<std::size_t>& kept) {
  Model md;
  md.m = static_cast<int>(kept.size());
  md.rows = kept;
  md.loc.resize(prob.num_vars());
  std::vector<int> block_index(prob.num_blocks(), -1);
  for (std::size_t k = 0; k < prob.num_blocks(); ++k) {
    const auto& cb = prob.cones()[k];
    const std::size_t off = prob.block_offset(k);
    if (cb.kind == ConeKind::Psd) {
      block_index[k] = static_cast<int>(md.dims.size());
      md.dims.push_back(static_cast<int>(cb.size));
      for (std::size_t j = 0; j < cb.size; ++j)
        for (std::size_t i = 0; i <= j; ++i) {
          auto& l = md.loc[off + ConicProblem::svec_position(cb.size, i, j)];
          l.kind = 2;
          l.a = block_index[k];
          l.p = static_cast<int>(i);
          l.q = static_cast<int>(j);
        }
    } else {
      for (std::size_t i = 0; i < cb.size; ++i) {
        auto& l = md.loc[off + i];
        l.kind = cb.kind == ConeKind::Free ? 1 : 0;
        l.a = md.n_lp++;
        if (l.kind == 1) l.minus = md.n_lp++;
      }
    }
  }
  md.lp_cols.resize(md.n_lp);
  md.psd_rows.resize(md.dims.size());
  md.c = md.zero();
  md.b = Vec::Zero(md.m);

  const auto& cobj = prob.objective();
  for (std::size_t v = 0; v < cobj.size(); ++v) {
    if (cobj[v] == 0.0) continue;
    const auto& l = md.loc[v];
    if (l.kind == 2) {
      const double val = l.p == l.q ? cobj[v] : cobj[v] / kSqrt2;
      md.c.psd[l.a](l.p, l.q) = val;
      md.c.psd[l.a](l.q, l.p) = val;
    } else {
      md.c.lp[l.a] = cobj[v];
      if (l.minus >= 0) md.c.lp[l.minus] = -cobj[v];
    }
  }

  std::vector<std::vector<SymEntry>> scratch(md.dims.size());
  for (int i = 0; i < md.m; ++i) {
    const auto& terms = prob.row(kept[i]);
    const double nrm = row_norm(terms);
    const double sc = nrm > 0 ? nrm : 1.0;
    md.row_scale.push_back(sc);
    md.b[i] = prob.rhs(kept[i]) / sc;
    for (auto& s : scratch) s.clear();
    for (const auto& t : terms) {
      const auto& l = md.loc[t.var];
      const double v = t.coef / sc;
      if (l.kind == 2) {
        scratch[l.a].push_back({l.p, l.q, l.p == l.q ? v : v / kSqrt2});
      } else {
        md.lp_cols[l.a].push_back({i, v});
        if (l.minus >= 0) md.lp_cols[l.minus].push_back({i, -v});
      }
    }
    for (std::size_t bk = 0; bk < scratch.size(); ++bk)
      if (!scratch[bk].empty()) md.psd_rows[bk].push_back({i, scratch[bk]});
  }
  return md;
}

struct Scaling {
  Vec lp_w, lp_lam;
  std::vector<Mat> R, W;
  std::vector<Vec> lam;
};

inline std::optional<Mat> chol_lower(const Mat& A) {
  Eigen::LLT<Mat> llt(A);
  if (llt.info() != Eigen::Success) return std::nullopt;
  Mat L = llt.matrixL();
  for (Idx i = 0; i < L.rows(); ++i)
    if (!(L(i, i) > 0.0) || !std::isfinite(L(i, i))) return std::nullopt;
  return L;
}

inline std::optional<Scaling> nt_scaling(const Point& x, const Point& s) {
  Scaling sc;
  sc.lp_w = (x.lp.array() / s.lp.array()).sqrt();
  sc.lp_lam = (x.lp.array() * s.lp.array()).sqrt();
  for (std::size_t b = 0; b < x.psd.size(); ++b) {
    auto lx = chol_lower(x.psd[b]);
    auto ls = chol_lower(s.psd[b]);
    if (!lx || !ls) return std::nullopt;
    Eigen::JacobiSVD<Mat> svd(ls->transpose() * *lx, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Vec lam = svd.singularValues();
    if (!(lam.minCoeff() > 0.0)) return std::nullopt;
    Mat R = *lx * svd.matrixV() * lam.cwiseSqrt().cwiseInverse().asDiagonal();
    sc.W.push_back(R * R.transpose());
    sc.R.push_back(std::move(R));
    sc.lam.push_back(std::move(lam));
  }
  return sc;
}

// R' v R (dual-type vector into the scaled space).
inline Point scale_dual(const Scaling& sc, const Point& v) {
  Point r;
  r.lp = sc.lp_w.cwiseProduct(v.lp);
  for (std::size_t b = 0; b < v.psd.size(); ++b) r.psd.push_back(sc.R[b].transpose() * v.psd[b] * sc.R[b]);
  return r;
}

// R z R' (scaled primal-type vector back to the original space).
inline Point unscale_primal(const Scaling& sc, const Point& z) {
  Point r;
  r.lp = sc.lp_w.cwiseProduct(z.lp);
  for (std::size_t b = 0; b < z.psd.size(); ++b) r.psd.push_back(sc.R[b] * z.psd[b] * sc.R[b].transpose());
  return r;
}

inline Point hinv(const Scaling& sc, const Point& v) {
  Point r;
  r.lp = sc.lp_w.cwiseProduct(sc.lp_w).cwiseProduct(v.lp);
  for (std::size_t b = 0; b < v.psd.size(); ++b) r.psd.push_back(sc.W[b] * v.psd[b] * sc.W[b]);
  return r;
}

inline Mat schur(const Model& md, const Scaling& sc) {
  Mat M = Mat::Zero(md.m, md.m);
  for (int k = 0; k < md.n_lp; ++k) {
    const double d = sc.lp_w[k] * sc.lp_w[k];
    const auto& col = md.lp_cols[k];
    for (std::size_t a = 0; a < col.size(); ++a)
      for (std::size_t bb = 0; bb <= a; ++bb) {
        const int ri = std::max(col[a].first, col[bb].first);
        const int rj = std::min(col[a].first, col[bb].first);
        M(ri, rj) += col[a].second * col[bb].second * d;
      }
  }
  for (std::size_t bk = 0; bk < md.dims.size(); ++bk) {
    const Mat& W = sc.W[bk];
    const int d = md.dims[bk];
    const auto& rows = md.psd_rows[bk];
    std::vector<int> slot(d, -1);
    for (std::size_t j = 0; j < rows.size(); ++j) {
      const auto& ej = rows[j].second;
      std::vector<int> touched;
      for (const auto& e : ej) {
        for (int idx : {e.p, e.q})
          if (slot[idx] < 0) {
            slot[idx] = static_cast<int>(touched.size());
            touched.push_back(idx);
          }
      }
      const Idx t = static_cast<Idx>(touched.size());
      Mat T = Mat::Zero(t, d);
      for (const auto& e : ej) {
        T.row(slot[e.p]) += e.v * W.row(e.q);
        if (e.p != e.q) T.row(slot[e.q]) += e.v * W.row(e.p);
      }
      Mat Wc(d, t);
      for (Idx k = 0; k < t; ++k) Wc.col(k) = W.col(touched[k]);
      const Mat G = Wc * T;
      for (int idx : touched) slot[idx] = -1;
      const int rj = rows[j].first;
      for (std::size_t i = j; i < rows.size(); ++i) {
        double s = 0.0;
        for (const auto& e : rows[i].second) s += (e.p == e.q ? 1.0 : 2.0) * e.v * G(e.p, e.q);
        M(rows[i].first, rj) += s;
      }
    }
  }
  return M.selfadjointView<Eigen::Lower>();
}

struct Factor {
  Mat M;
  Eigen::LLT<Mat> llt;
  Vec solve(const Vec& r) const {
    Vec x = llt.solve(r);
    const double rn = r.norm();
    for (int it = 0; it < 5; ++it) {
      const Vec res = r - M * x;
      if (res.norm() <= 1e-14 * rn) break;
      x += llt.solve(res);
    }
    return x;
  }
};

inline std::optional<Factor> factor(Mat M, double reg) {
  Factor f;
  f.M = M;
  for (double r = reg; r <= 1e-3; r *= 100.0) {
    Mat Mr = M;
    Mr.diagonal().array() += r;
    f.llt.compute(Mr);
    if (f.llt.info() == Eigen::Success) return f;
  }
  return std::nullopt;
}

// Largest alpha with lam + alpha * d in the cone (scaled space, base diag(lam)).
inline double max_step(const Scaling& sc, const Point& d) {
  double amax = std::numeric_limits<double>::infinity();
  for (Idx k = 0; k < d.lp.size(); ++k)
    if (d.lp[k] < 0) amax = std::min(amax, -sc.lp_lam[k] / d.lp[k]);
  for (std::size_t b = 0; b < d.psd.size(); ++b) {
    const Vec is = sc.lam[b].cwiseSqrt().cwiseInverse();
    Mat T = is.asDiagonal() * d.psd[b] * is.asDiagonal();
    T = 0.5 * (T + T.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Mat> es(T, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues()[0];
    if (lmin < 0) amax = std::min(amax, -1.0 / lmin);
  }
  return amax;
}

struct Direction {
  Point dx, ds, dxs, dss;  // original and scaled
  Vec dy;
  double dtau = 0, dkappa = 0;
};

}  // namespace detail

inline SolveOutcome solve(const ConicProblem& prob, const std::optional<WarmStart>& warm = std::nullopt,
                          const SolverOptions& opt = {}) {
  using namespace detail;
  SolveOutcome out;
  const std::size_t nvars = prob.num_vars();
  const std::size_t mrows = prob.num_rows();
  for (double v : prob.objective())
    if (!std::isfinite(v)) throw MalformedProblem("non-finite objective coefficient");
  for (std::size_t r = 0; r < mrows; ++r) {
    if (!std::isfinite(prob.rhs(r))) throw MalformedProblem("non-finite right-hand side");
    for (const auto& t : prob.row(r))
      if (!std::isfinite(t.coef)) throw MalformedProblem("non-finite coefficient");
  }

  const RowReduction red = reduce_rows(prob);
  for (std::size_t k = 0; k < red.redundant.size(); ++k) {
    const std::size_t r = red.redundant[k];
    const double nr = row_norm(prob.row(r));
    double resid = prob.rhs(r) / (nr > 0 ? nr : 1.0);
    for (std::size_t q = 0; q < red.kept.size(); ++q)
      resid -= red.combos[k][q] * prob.rhs(red.kept[q]) / row_norm(prob.row(red.kept[q]));
    if (std::abs(resid) > 1e-9 * (1.0 + std::abs(prob.rhs(r)))) {
      // An inconsistent dependent row is itself a Farkas ray.
      std::vector<double> y(mrows, 0.0);
      const double sg = resid > 0 ? 1.0 : -1.0;
      y[r] = sg / (nr > 0 ? nr : 1.0);
      for (std::size_t q = 0; q < red.kept.size(); ++q)
        y[red.kept[q]] = -sg * red.combos[k][q] / row_norm(prob.row(red.kept[q]));
      for (auto& v : y) v /= std::abs(resid);
      out.status = SolveStatus::PrimalInfeasible;
      out.y = y;
      out.x.assign(nvars, 0.0);
      out.s.assign(nvars, 0.0);
      for (std::size_t rr = 0; rr < mrows; ++rr)
        for (const auto& t : prob.row(rr)) out.s[t.var] -= t.coef * y[rr];
      out.message = "inconsistent dependent equality row " + std::to_string(r);
      return out;
    }
  }

  const Model md = build_model(prob, red.kept);
  const double nu = md.nu();
  const double bnorm = md.b.norm();
  const double cnorm = md.c.norm();

  Point x = md.identity();
  Point s = md.identity();
  Vec y = Vec::Zero(md.m);
  double tau = 1.0, kappa = 1.0;

  if (warm && warm->x.size() == nvars && warm->s.size() == nvars && warm->y.size() == mrows) {
    Point wx = md.zero(), ws = md.zero();
    for (std::size_t v = 0; v < nvars; ++v) {
      const auto& l = md.loc[v];
      if (l.kind == 2) {
        const double sc = l.p == l.q ? 1.0 : 1.0 / kSqrt2;
        wx.psd[l.a](l.p, l.q) = wx.psd[l.a](l.q, l.p) = warm->x[v] * sc;
        ws.psd[l.a](l.p, l.q) = ws.psd[l.a](l.q, l.p) = warm->s[v] * sc;
      } else if (l.kind == 1) {
        wx.lp[l.a] = std::max(warm->x[v], 0.0);
        wx.lp[l.minus] = std::max(-warm->x[v], 0.0);
        ws.lp[l.a] = ws.lp[l.minus] = std::abs(warm->s[v]);
      } else {
        wx.lp[l.a] = std::max(warm->x[v], 0.0);
        ws.lp[l.a] = std::max(warm->s[v], 0.0);
      }
    }
    const double beta = opt.warm_blend;
    x = wx.scaled(1.0 - beta);
    x.axpy(beta, md.identity());
    s = ws.scaled(1.0 - beta);
    s.axpy(beta, md.identity());
    for (int i = 0; i < md.m; ++i) y[i] = warm->y[md.rows[i]] * md.row_scale[i];
    y *= 1.0 - beta;
    if (nt_scaling(x, s)) {
      kappa = std::max(x.dot(s) / nu, 1e-8);
    } else {
      x = md.identity();
      s = md.identity();
      y.setZero();
    }
  }

  auto finish = [&](SolveStatus st) {
    out.status = st;
    out.x.assign(nvars, 0.0);
    out.s.assign(nvars, 0.0);
    out.y.assign(mrows, 0.0);
    double fx = 1.0 / tau, fy = 1.0 / tau;
    if (st == SolveStatus::PrimalInfeasible) {
      fx = 0.0;
      fy = 1.0 / md.b.dot(y);
    } else if (st == SolveStatus::DualInfeasible) {
      fx = -1.0 / md.c.dot(x);
      fy = 0.0;
    }
    for (std::size_t v = 0; v < nvars; ++v) {
      const auto& l = md.loc[v];
      if (l.kind == 2) {
        const double sc = l.p == l.q ? 1.0 : kSqrt2;
        out.x[v] = fx * x.psd[l.a](l.p, l.q) * sc;
        out.s[v] = fy * s.psd[l.a](l.p, l.q) * sc;
      } else if (l.kind == 1) {
        out.x[v] = fx * (x.lp[l.a] - x.lp[l.minus]);
        out.s[v] = fy * 0.5 * (s.lp[l.a] + s.lp[l.minus]);
      } else {
        out.x[v] = fx * x.lp[l.a];
        out.s[v] = fy * s.lp[l.a];
      }
    }
    for (int i = 0; i < md.m; ++i) out.y[md.rows[i]] = fy * y[i] / md.row_scale[i];
    if (st == SolveStatus::PrimalInfeasible) {
      // Report the exact dual slack of the ray.
      std::fill(out.s.begin(), out.s.end(), 0.0);
      for (std::size_t r = 0; r < mrows; ++r)
        for (const auto& t : prob.row(r)) out.s[t.var] -= t.coef * out.y[r];
    }
    return out;
  };

  int small_steps = 0;
  for (int iter = 0;; ++iter) {
    out.iterations = iter;
    const Vec Ax = md.apply_A(x);
    const Point Aty = md.apply_At(y);
    const Vec rp = tau * md.b - Ax;
    Point rd = md.c.scaled(tau);
    rd.axpy(-1.0, Aty);
    rd.axpy(-1.0, s);
    const double ctx = md.c.dot(x), bty = md.b.dot(y);
    const double rg = kappa + ctx - bty;
    const double mu = (x.dot(s) + tau * kappa) / (nu + 1.0);

    out.primal_residual = rp.norm() / tau / (1.0 + bnorm);
    out.dual_residual = rd.norm() / tau / (1.0 + cnorm);
    out.primal_objective = ctx / tau;
    out.dual_objective = bty / tau;
    out.gap = std::abs(ctx - bty) / tau / (1.0 + std::abs(ctx / tau) + std::abs(bty / tau));
    if (opt.verbose)
      std::fprintf(stderr, "%3d pobj=%+.6e dobj=%+.6e pres=%.2e dres=%.2e gap=%.2e tau=%.2e kap=%.2e mu=%.2e\n",
                   iter, out.primal_objective, out.dual_objective, out.primal_residual, out.dual_residual, out.gap,
                   tau, kappa, mu);

    if (out.primal_residual <= opt.tolerance && out.dual_residual <= opt.tolerance && out.gap <= opt.tolerance)
      return finish(SolveStatus::Optimal);
    if (bty > 0) {
      Point ray = Aty;
      ray.axpy(1.0, s);
      if (ray.norm() / bty <= opt.tolerance * std::max(1.0, cnorm)) return finish(SolveStatus::PrimalInfeasible);
    }
    if (ctx < 0) {
      if (Ax.norm() / -ctx <= opt.tolerance * std::max(1.0, bnorm)) return finish(SolveStatus::DualInfeasible);
    }
    if (iter >= opt.max_iterations) {
      out.message = "iteration limit";
      return finish(SolveStatus::Stall);
    }

    const auto sc = nt_scaling(x, s);
    if (!sc) {
      out.message = "lost positive definiteness";
      return finish(SolveStatus::Stall);
    }
    const auto fac = factor(schur(md, *sc), opt.regularization);
    if (!fac) {
      out.message = "Schur complement factorization failed";
      return finish(SolveStatus::Stall);
    }
    const Point hc = hinv(*sc, md.c);
    const Vec Ahc = md.apply_A(hc);
    const Vec q = fac->solve(Ahc + md.b);
    const double denom = -Ahc.dot(q) + md.c.dot(hc) + md.b.dot(q) + kappa / tau;
    const Point hrd = hinv(*sc, rd);

    auto direction = [&](double eta, const Point& rc, double rtau) {
      Direction d;
      Point Z = md.zero();
      Z.lp = rc.lp.cwiseQuotient(sc->lp_lam);
      for (std::size_t b = 0; b < Z.psd.size(); ++b) {
        const Vec& lam = sc->lam[b];
        for (Idx j = 0; j < lam.size(); ++j)
          for (Idx i = 0; i < lam.size(); ++i) Z.psd[b](i, j) = 2.0 * rc.psd[b](i, j) / (lam[i] + lam[j]);
      }
      Point g = unscale_primal(*sc, Z);
      g.axpy(-eta, hrd);
      const Vec p = fac->solve(eta * rp - md.apply_A(g));
      d.dtau = (eta * rg + Ahc.dot(p) + md.c.dot(g) - md.b.dot(p) + rtau / tau) / denom;
      d.dy = p + q * d.dtau;
      d.dkappa = (rtau - kappa * d.dtau) / tau;
      d.ds = rd.scaled(eta);
      d.ds.axpy(-1.0, md.apply_At(d.dy));
      d.ds.axpy(d.dtau, md.c);
      d.dss = scale_dual(*sc, d.ds);
      d.dxs = Z;
      d.dxs.axpy(-1.0, d.dss);
      d.dx = unscale_primal(*sc, d.dxs);
      return d;
    };
    auto step_limit = [&](const Direction& d) {
      double a = std::min(max_step(*sc, d.dxs), max_step(*sc, d.dss));
      if (d.dtau < 0) a = std::min(a, -tau / d.dtau);
      if (d.dkappa < 0) a = std::min(a, -kappa / d.dkappa);
      return a;
    };

    // Predictor.
    Point rc = md.zero();
    rc.lp = -sc->lp_lam.cwiseProduct(sc->lp_lam);
    for (std::size_t b = 0; b < rc.psd.size(); ++b) rc.psd[b] = (-sc->lam[b].array().square()).matrix().asDiagonal();
    const Direction aff = direction(1.0, rc, -tau * kappa);
    const double alpha_aff = std::min(1.0, step_limit(aff));
    const double sigma = std::clamp(std::pow(1.0 - alpha_aff, 3), 0.0, 1.0);

    // Corrector.
    rc.lp = (sigma * mu - sc->lp_lam.array().square() - aff.dxs.lp.array() * aff.dss.lp.array()).matrix();
    for (std::size_t b = 0; b < rc.psd.size(); ++b) {
      const Mat prod = aff.dxs.psd[b] * aff.dss.psd[b];
      rc.psd[b] = -0.5 * (prod + prod.transpose());
      rc.psd[b].diagonal().array() += sigma * mu - sc->lam[b].array().square();
    }
    const Direction dir = direction(1.0 - sigma, rc, sigma * mu - tau * kappa - aff.dtau * aff.dkappa);
    const double alpha = std::min(1.0, opt.step_fraction * step_limit(dir));

    x.axpy(alpha, dir.dx);
    s.axpy(alpha, dir.ds);
    y += alpha * dir.dy;
    tau += alpha * dir.dtau;
    kappa += alpha * dir.dkappa;
    for (auto* pt : {&x, &s})
      for (auto& M : pt->psd) M = 0.5 * (M + M.transpose()).eval();

    small_steps = alpha < 1e-8 ? small_steps + 1 : 0;
    if (small_steps >= 5) {
      out.message = "step length collapsed";
      return finish(SolveStatus::Stall);
    }
  }
}

// |<x, s>| summed over all cones.
inline double complementarity(const SolveOutcome& o) {
  double r = 0.0;
  for (std::size_t i = 0; i < o.x.size(); ++i) r += o.x[i] * o.s[i];
  return std::abs(r);
}

// Unscaled optimality residuals of an Optimal outcome, each relative to
// 1 + the size of the data it is measured against.
struct KktReport {
  double primal = 0.0;  // ||Ax - b|| / (1 + ||b||)
  double dual = 0.0;    // ||c - A'y - s|| / (1 + ||c||)
  double gap = 0.0;     // |c'x - b'y| / (1 + |c'x| + |b'y|)
  double cone = 0.0;    // worst cone violation of x or s
  bool ok(double tol) const { return primal <= tol && dual <= tol && gap <= tol && cone <= tol; }
};

inline double cone_violation(const ConicProblem& p, const std::vector<double>& v) {
  double worst = 0.0;
  for (std::size_t k = 0; k < p.num_blocks(); ++k) {
    const auto& cb = p.cones()[k];
    const std::size_t off = p.block_offset(k);
    if (cb.kind == ConeKind::Nonneg) {
      for (std::size_t i = 0; i < cb.size; ++i) worst = std::max(worst, -v[off + i]);
    } else if (cb.kind == ConeKind::Psd) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p.block_matrix(v, k), Eigen::EigenvaluesOnly);
      worst = std::max(worst, -es.eigenvalues()[0]);
    }
  }
  return worst;
}

inline KktReport kkt_check(const ConicProblem& p, const SolveOutcome& o) {
  KktReport k;
  std::vector<double> rd = p.objective();
  double rp2 = 0.0, b2 = 0.0, by = 0.0;
  for (std::size_t r = 0; r < p.num_rows(); ++r) {
    double ax = 0.0;
    for (const auto& t : p.row(r)) {
      ax += t.coef * o.x[t.var];
      rd[t.var] -= t.coef * o.y[r];
    }
    rp2 += (ax - p.rhs(r)) * (ax - p.rhs(r));
    b2 += p.rhs(r) * p.rhs(r);
    by += p.rhs(r) * o.y[r];
  }
  double rd2 = 0.0, c2 = 0.0, cx = 0.0;
  for (std::size_t i = 0; i < rd.size(); ++i) {
    const double ci = p.objective()[i];
    rd2 += (rd[i] - o.s[i]) * (rd[i] - o.s[i]);
    c2 += ci * ci;
    cx += ci * o.x[i];
  }
  k.primal = std::sqrt(rp2) / (1.0 + std::sqrt(b2));
  k.dual = std::sqrt(rd2) / (1.0 + std::sqrt(c2));
  k.gap = std::abs(cx - by) / (1.0 + std::abs(cx) + std::abs(by));
  k.cone = std::max(cone_violation(p, o.x), cone_violation(p, o.s));
  return k;
}

struct CertificateCheck {
  bool valid = false;
  double cone_violation = 0.0;  // most negative dual-cone eigenvalue / entry of -A'y, 0 if none
  double separation = 0.0;      // b'y / ||y||
};

// Checks y as a Farkas ray: b'y > 0 and -A'y in the dual cone (up to tol).
inline CertificateCheck check_infeasibility_certificate(const ConicProblem& p, const std::vector<double>& y,
                                                        double tol = 1e-6) {
  CertificateCheck ck;
  std::vector<double> z(p.num_vars(), 0.0);
  double by = 0.0, yn = 0.0;
  for (std::size_t r = 0; r < p.num_rows(); ++r) {
    by += p.rhs(r) * y.at(r);
    yn += y[r] * y[r];
    for (const auto& t : p.row(r)) z[t.var] -= t.coef * y[r];
  }
  yn = std::sqrt(yn);
  if (yn == 0.0) return ck;
  for (auto& v : z) v /= yn;
  double worst = 0.0;
  for (std::size_t k = 0; k < p.num_blocks(); ++k) {
    const auto& cb = p.cones()[k];
    const std::size_t off = p.block_offset(k);
    if (cb.kind == ConeKind::Nonneg) {
      for (std::size_t i = 0; i < cb.size; ++i) worst = std::max(worst, -z[off + i]);
    } else if (cb.kind == ConeKind::Free) {
      for (std::size_t i = 0; i < cb.size; ++i) worst = std::max(worst, std::abs(z[off + i]));
    } else {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p.block_matrix(z, k), Eigen::EigenvaluesOnly);
      worst = std::max(worst, -es.eigenvalues()[0]);
    }
  }
  ck.cone_violation = worst;
  ck.separation = by / yn;
  ck.valid = ck.separation > 0 && worst <= tol;
  return ck;
}

}  // namespace dtafopt::conic
