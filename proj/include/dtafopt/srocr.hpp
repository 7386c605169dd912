#pragma once

// Sequential rank-one constraint relaxation for unimodular waveform design.
//
// Each outer iteration solves
//   min t  s.t.  X psd, diag(X) = 1,
//                per lag l: |A_X(l, f)|^2 <= t on the band (Gram-pair LMI),
//                u^H X u >= w N,
// where A_X(l, .) has coefficients X[m+l, m] and u is the principal
// eigenvector of the previous iterate.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "dtafopt/ambiguity.hpp"
#include "dtafopt/conic/hermitian.hpp"
#include "dtafopt/conic/solver.hpp"
#include "dtafopt/errors.hpp"
#include "dtafopt/linalg.hpp"
#include "dtafopt/rational.hpp"
#include "dtafopt/trigpoly.hpp"

namespace dtafopt {

enum class LiftMode { Trimmed, PaperFull };
enum class ConstraintStyle { ContinuousBand, GridOnly };

struct DesignSpec {
  std::size_t n = 32;
  std::size_t l = 3;
  Rational f_r{3, 32};
  double zeta = 10.0;
  double kappa = 0.99;
  double eps = 1e-3;
  LiftMode mode = LiftMode::Trimmed;
  ConstraintStyle style = ConstraintStyle::ContinuousBand;
  long grid_m = 0;  // optional for ContinuousBand (metrics only), required for GridOnly
  long grid_k = 0;
  std::uint64_t seed = 1;
  std::size_t iteration_cap = 2000;
  bool warm_start = true;

  bool has_grid() const { return grid_m > 0; }

  void validate() const {
    if (n < 2) throw ConfigError("sequence length must be at least 2");
    if (l < 1) throw ConfigError("need at least one lag (L >= 1)");
    if (l > n) throw ConfigError("max lag exceeds sequence length");
    if (f_r.num < 0 || 2 * f_r.num >= f_r.den) throw ConfigError("band half-width must lie in [0, 1/2)");
    if (style == ConstraintStyle::ContinuousBand && f_r.num == 0) throw ConfigError("band half-width must be positive");
    if (!(zeta > 1.0)) throw ConfigError("zeta must exceed 1");
    if (!(kappa > 0.0 && kappa < 1.0)) throw ConfigError("kappa must lie in (0, 1)");
    if (!(eps > 0.0)) throw ConfigError("eps must be positive");
    if (style == ConstraintStyle::GridOnly && !has_grid()) throw ConfigError("grid style needs M and K");
    if (has_grid()) {
      if (grid_k < 0) throw ConfigError("grid K must be nonnegative");
      if (!(Rational(grid_k, grid_m) == f_r)) throw ConfigError("grid K/M must equal the band half-width");
    }
    if (iteration_cap < 1) throw ConfigError("iteration cap must be positive");
  }

  SidelobeRegion region() const {
    if (has_grid()) return SidelobeRegion(l, f_r, DopplerGrid{grid_m, grid_k});
    return SidelobeRegion(l, f_r);
  }

  std::string describe() const {
    char buf[256];
    std::snprintf(buf, sizeof buf, "N=%zu L=%zu fR=%s zeta=%g kappa=%g eps=%g mode=%s style=%s", n, l,
                  f_r.str().c_str(), zeta, kappa, eps, mode == LiftMode::Trimmed ? "trimmed" : "paperfull",
                  style == ConstraintStyle::GridOnly ? "grid" : "band");
    std::string s(buf);
    if (has_grid()) s += " M=" + std::to_string(grid_m) + " K=" + std::to_string(grid_k);
    return s;
  }
};

struct RankRow {
  CVector u;
  double w = 0.0;
};

struct LagBlocks {
  std::size_t lag = 0;
  std::size_t degree = 0;  // K; Q is (K+1)x(K+1)
  conic::HermitianBlock border;
  std::optional<conic::HermitianBlock> p;
};

struct IterationSdp {
  conic::ConicProblem problem;
  std::size_t t_var = 0;
  conic::HermitianBlock x;
  std::vector<LagBlocks> lags;
  std::optional<std::size_t> slack_var;
};

// h_m of lag l as a linear function of X: returns (row, col) of X, or nothing
// when the coefficient is structurally zero.
inline std::optional<std::pair<std::size_t, std::size_t>> lag_coefficient_entry(const DesignSpec& spec, std::size_t lag,
                                                                                 std::size_t m) {
  if (spec.mode == LiftMode::Trimmed) return std::make_pair(m + lag, m);
  if (m < lag) return std::nullopt;
  return std::make_pair(m, m - lag);
}

inline IterationSdp assemble_iteration_sdp(const DesignSpec& spec, const std::optional<RankRow>& rank = std::nullopt) {
  spec.validate();
  using conic::kNoRow;
  IterationSdp sdp;
  auto& prob = sdp.problem;
  const std::size_t n = spec.n;
  const std::size_t tb = prob.add_free(1);
  sdp.t_var = prob.var(tb, 0);
  prob.set_objective(sdp.t_var, 1.0);
  sdp.x = conic::add_hermitian_psd(prob, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = prob.add_row(1.0);
    conic::add_hermitian_entry(prob, sdp.x, r, kNoRow, i, i, 1.0);
  }

  if (spec.style == ConstraintStyle::ContinuousBand) {
    const SegmentWeights w = segment_weights(spec.f_r.value());
    for (std::size_t l = 1; l <= spec.l; ++l) {
      const std::size_t ncoef = spec.mode == LiftMode::Trimmed ? n - l : n;
      if (ncoef == 0) continue;
      LagBlocks lb;
      lb.lag = l;
      lb.degree = ncoef - 1;
      lb.border = add_bordered_block(prob, lb.degree);
      if (lb.degree > 0) lb.p = conic::add_hermitian_psd(prob, lb.degree);
      for (std::size_t m = 0; m < ncoef; ++m) {
        const std::size_t re = prob.add_row(0.0);
        const std::size_t im = prob.add_row(0.0);
        conic::add_hermitian_entry(prob, lb.border, re, im, m, lb.degree + 1, 1.0);
        if (auto e = lag_coefficient_entry(spec, l, m))
          conic::add_hermitian_entry(prob, sdp.x, re, im, e->first, e->second, -1.0);
      }
      add_segment_lmi_rows(prob, lb.border, lb.p, lb.degree, w, 0.0, sdp.t_var);
      sdp.lags.push_back(lb);
    }
  } else {
    // t >= |A_X(l, k/M)|^2 through [[t, A], [conj(A), 1]] psd.
    for (std::size_t l = 1; l <= spec.l && l < n; ++l)
      for (long k = -spec.grid_k; k <= spec.grid_k; ++k) {
        const auto g = conic::add_hermitian_psd(prob, 2);
        const std::size_t r00 = prob.add_row(0.0);
        conic::add_hermitian_entry(prob, g, r00, kNoRow, 0, 0, 1.0);
        prob.add_term(r00, sdp.t_var, -1.0);
        const std::size_t r11 = prob.add_row(1.0);
        conic::add_hermitian_entry(prob, g, r11, kNoRow, 1, 1, 1.0);
        const std::size_t re = prob.add_row(0.0);
        const std::size_t im = prob.add_row(0.0);
        conic::add_hermitian_entry(prob, g, re, im, 0, 1, 1.0);
        const double f = static_cast<double>(k) / static_cast<double>(spec.grid_m);
        for (std::size_t m = 0; m + l < n; ++m)
          conic::add_hermitian_entry(prob, sdp.x, re, im, m + l, m,
                                     -std::polar(1.0, -2.0 * kPi * f * static_cast<double>(m)));
      }
  }

  if (rank) {
    const std::size_t sb = prob.add_nonneg(1);
    sdp.slack_var = prob.var(sb, 0);
    const std::size_t r = prob.add_row(rank->w * static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        conic::add_hermitian_entry(prob, sdp.x, r, kNoRow, i, j,
                                   std::conj(rank->u[static_cast<Eigen::Index>(i)]) * rank->u[static_cast<Eigen::Index>(j)]);
    prob.add_term(r, *sdp.slack_var, -1.0);
  }
  return sdp;
}

// Unit principal direction of X. Eigenvalues within 1e-4 * lambda_max of the
// top one are treated as a tie; the direction is then the projection of a
// seeded unimodular vector onto that eigenspace.
inline CVector principal_direction(const EigenDecomposition& ed, std::uint64_t seed) {
  const double top = ed.values.front();
  Eigen::Index cluster = 1;
  while (cluster < static_cast<Eigen::Index>(ed.values.size()) &&
         ed.values[static_cast<std::size_t>(cluster)] >= top - 1e-4 * std::abs(top))
    ++cluster;
  if (cluster == 1) return ed.vectors.col(0);
  std::mt19937_64 gen(seed);
  CVector v(ed.vectors.rows());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double phase = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    v[i] = std::polar(1.0, 2.0 * kPi * phase);
  }
  const CMatrix basis = ed.vectors.leftCols(cluster);
  CVector u = basis * (basis.adjoint() * v);
  const double nrm = u.norm();
  if (nrm == 0.0) return ed.vectors.col(0);
  return u / nrm;
}

struct TraceRow {
  std::size_t iter = 0;
  bool feasible = false;
  bool stalled = false;
  double w = 0.0;
  double delta = 0.0;
  double t = 0.0;
  double lambda_max_ratio = 0.0;
  int solver_iterations = 0;
};

struct LagCertificate {
  std::size_t lag = 0;
  SegmentBoundCertificate cert;  // gamma^2 = t of the accepted solve; h read from X
};

struct DesignResult {
  ComplexSequence x_opt;   // projected, unimodular
  ComplexSequence x_raw;   // sqrt(lambda_max) u before projection
  double modulus_deviation = 0.0;
  MetricsReport metrics;
  std::vector<TraceRow> trace;
  HermitianMatrix x_final;
  double t_final = 0.0;
  double w_last = 0.0;
  std::size_t iterations = 0;  // outer SDP solves after the initial point
  bool hit_iteration_cap = false;
  std::vector<LagCertificate> certificates;
  double seconds = 0.0;
};

struct InitialPoint {
  HermitianMatrix x;
  double w = 0.0;
  double t = 0.0;
  conic::SolveOutcome outcome;
  IterationSdp sdp;
};

struct RunHooks {
  std::function<void(std::size_t iter, const IterationSdp&)> on_problem;
  std::function<void(const TraceRow&)> on_iteration;
  conic::SolverOptions solver;
};

inline InitialPoint initial_point(const DesignSpec& spec, const RunHooks& hooks = {}) {
  InitialPoint ip;
  ip.sdp = assemble_iteration_sdp(spec);
  if (hooks.on_problem) hooks.on_problem(0, ip.sdp);
  ip.outcome = conic::solve(ip.sdp.problem, std::nullopt, hooks.solver);
  if (ip.outcome.status != conic::SolveStatus::Optimal)
    throw DesignError(std::string("relaxed initial problem not solved: ") + conic::to_string(ip.outcome.status) +
                      " " + ip.outcome.message);
  ip.x = conic::hermitian_value(ip.sdp.problem, ip.outcome.x, ip.sdp.x);
  ip.t = ip.outcome.x[ip.sdp.t_var];
  const double lam = eig_hermitian(ip.x).values.front();
  ip.w = (1.0 - lam / static_cast<double>(spec.n)) / spec.zeta;
  return ip;
}

inline std::vector<LagCertificate> extract_certificates(const IterationSdp& sdp, const conic::SolveOutcome& out,
                                                        const HermitianMatrix& x, const DesignSpec& spec) {
  std::vector<LagCertificate> certs;
  const double t = out.x[sdp.t_var];
  for (const auto& lb : sdp.lags) {
    const HermitianMatrix border = conic::hermitian_value(sdp.problem, out.x, lb.border);
    const auto k = static_cast<Eigen::Index>(lb.degree);
    std::vector<cplx> h(lb.degree + 1, cplx(0.0));
    for (std::size_t m = 0; m <= lb.degree; ++m)
      if (auto e = lag_coefficient_entry(spec, lb.lag, m)) h[m] = x(e->first, e->second);
    SegmentBoundCertificate c{std::sqrt(std::max(t, 0.0)),
                              HermitianMatrix::from_upper(border.dense().topLeftCorner(k + 1, k + 1)),
                              lb.p ? conic::hermitian_value(sdp.problem, out.x, *lb.p)
                                   : HermitianMatrix::from_upper(CMatrix::Zero(0, 0)),
                              h};
    certs.push_back({lb.lag, std::move(c)});
  }
  return certs;
}

inline double db_change(double t_new, double t_old) {
  if (t_new == t_old) return 0.0;
  if (!(t_new > 0.0) || !(t_old > 0.0)) return std::numeric_limits<double>::infinity();
  return std::abs(10.0 * std::log10(t_new / t_old));
}

inline DesignResult srocr_run(const DesignSpec& spec, const RunHooks& hooks = {}) {
  spec.validate();
  const auto t_start = std::chrono::steady_clock::now();
  const double n = static_cast<double>(spec.n);
  DesignResult res;

  InitialPoint ip = initial_point(spec, hooks);
  HermitianMatrix x = ip.x;
  EigenDecomposition ed = eig_hermitian(x);
  double t = ip.t;
  double w = ip.w;
  double delta = ip.w;
  std::optional<conic::SolveOutcome> last_ok;
  std::optional<IterationSdp> last_sdp;
  std::optional<conic::WarmStart> warm;

  res.trace.push_back({0, true, false, w, delta, t, ed.values.front() / n, ip.outcome.iterations});
  if (hooks.on_iteration) hooks.on_iteration(res.trace.back());

  std::size_t i = 0;
  while (true) {
    const RankRow rank{principal_direction(ed, spec.seed), w};
    IterationSdp sdp = assemble_iteration_sdp(spec, rank);
    if (hooks.on_problem) hooks.on_problem(i + 1, sdp);
    const auto out =
        conic::solve(sdp.problem, spec.warm_start ? warm : std::optional<conic::WarmStart>{}, hooks.solver);
    const double t_prev = t;
    TraceRow row;
    row.iter = i + 1;
    row.w = w;
    row.solver_iterations = out.iterations;
    if (out.status == conic::SolveStatus::Optimal) {
      x = conic::hermitian_value(sdp.problem, out.x, sdp.x);
      ed = eig_hermitian(x);
      t = out.x[sdp.t_var];
      delta = std::max(0.0, (1.0 - ed.values.front() / n) / spec.zeta);
      row.feasible = true;
      warm = conic::WarmStart{out.x, out.y, out.s};
      last_ok = out;
      last_sdp = std::move(sdp);
    } else {
      delta /= 2.0;
      row.stalled = out.status != conic::SolveStatus::PrimalInfeasible;
    }
    const double w_used = w;
    w = std::min(1.0, ed.values.front() / n + delta);
    row.delta = delta;
    row.t = t;
    row.lambda_max_ratio = ed.values.front() / n;
    res.trace.push_back(row);
    if (hooks.on_iteration) hooks.on_iteration(row);
    ++i;
    if (w_used >= spec.kappa && db_change(t, t_prev) <= spec.eps) break;
    if (i >= spec.iteration_cap) {
      res.hit_iteration_cap = true;
      break;
    }
  }

  res.iterations = i;
  res.x_final = x;
  res.t_final = t;
  res.w_last = w;
  const double lam = std::max(ed.values.front(), 0.0);
  const CVector u = ed.vectors.col(0);
  std::vector<cplx> raw(spec.n);
  for (std::size_t k = 0; k < spec.n; ++k) raw[k] = std::sqrt(lam) * u[static_cast<Eigen::Index>(k)];
  res.x_raw = ComplexSequence(raw);
  res.modulus_deviation = res.x_raw.modulus_deviation();
  res.x_opt = res.x_raw.projected_unimodular();
  res.metrics = evaluate_metrics(res.x_opt, spec.region());
  if (last_ok && spec.style == ConstraintStyle::ContinuousBand)
    res.certificates = extract_certificates(*last_sdp, *last_ok, x, spec);
  else if (!last_ok && spec.style == ConstraintStyle::ContinuousBand)
    res.certificates = extract_certificates(ip.sdp, ip.outcome, x, spec);
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return res;
}

inline DesignResult design_grid_baseline(const DesignSpec& spec, const RunHooks& hooks = {}) {
  if (spec.style != ConstraintStyle::GridOnly) throw ConfigError("grid baseline needs the grid constraint style");
  return srocr_run(spec, hooks);
}

inline void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace, std::size_t n) {
  os << "iter,feasible,w,delta,t_db,lambda_max_ratio\n";
  char buf[200];
  const double n2 = static_cast<double>(n) * static_cast<double>(n);
  for (const auto& r : trace) {
    const double tdb = r.t > 0 ? 10.0 * std::log10(r.t / n2) : -std::numeric_limits<double>::infinity();
    std::snprintf(buf, sizeof buf, "%zu,%d,%.10g,%.10g,%.6f,%.10g\n", r.iter, r.feasible ? 1 : 0, r.w, r.delta, tdb,
                  r.lambda_max_ratio);
    os << buf;
  }
}

}  // namespace dtafopt
