#pragma once

// Causal trigonometric polynomials H(f) = sum_n h_n exp(-j 2 pi f n) on the
// Doppler band [-f_R, f_R], the band indicator E(f) = d0 + 2 Re(d1 e^{-j2pi f}),
// and the Gram-pair LMI bounding |H| on the band.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "dtafopt/conic/hermitian.hpp"
#include "dtafopt/conic/solver.hpp"
#include "dtafopt/errors.hpp"
#include "dtafopt/linalg.hpp"

namespace dtafopt {

class CausalTrigPoly {
 public:
  CausalTrigPoly() : h_{cplx(0.0)} {}
  explicit CausalTrigPoly(std::vector<cplx> coeffs) : h_(std::move(coeffs)) {
    if (h_.empty()) throw DimensionError("trig polynomial needs at least one coefficient");
  }

  std::size_t degree() const { return h_.size() - 1; }
  const std::vector<cplx>& coeffs() const { return h_; }

  cplx evaluate(double f) const {
    const cplx z = std::polar(1.0, -2.0 * kPi * f);
    cplx acc = 0.0;
    for (std::size_t k = h_.size(); k-- > 0;) acc = acc * z + h_[k];
    return acc;
  }

  double modulus(double f) const { return std::abs(evaluate(f)); }

  // Coefficients moved up by l with zero fill; |H| is unchanged.
  CausalTrigPoly shifted(std::size_t l) const {
    std::vector<cplx> out(l, cplx(0.0));
    out.insert(out.end(), h_.begin(), h_.end());
    return CausalTrigPoly(std::move(out));
  }

 private:
  std::vector<cplx> h_;
};

struct SegmentWeights {
  double f_r = 0.0;
  double d0 = 0.0;
  cplx d1 = 0.0;

  double indicator(double f) const { return d0 + 2.0 * (d1 * std::polar(1.0, -2.0 * kPi * f)).real(); }
};

inline SegmentWeights segment_weights(double f_r) {
  if (!(f_r > 0.0 && f_r < 0.5)) throw DomainError("band half-width must lie in (0, 1/2)");
  const double t = std::tan(kPi * f_r);
  const double t2 = t * t;
  return {f_r, (t2 - 1.0) / 2.0, cplx((1.0 + t2) / 4.0, 0.0)};
}

// d0 Theta^(n) + conj(d1) Theta^(n+1) + d1 Theta^(n-1), dimension K.
struct PhiMatrix {
  std::size_t dim = 0;
  long offset = 0;
  SegmentWeights w;

  cplx entry(std::size_t i, std::size_t j) const {
    cplx v = 0.0;
    if (ElementaryToeplitz{dim, offset}.entry(i, j) != 0.0) v += w.d0;
    if (ElementaryToeplitz{dim, offset + 1}.entry(i, j) != 0.0) v += std::conj(w.d1);
    if (ElementaryToeplitz{dim, offset - 1}.entry(i, j) != 0.0) v += w.d1;
    return v;
  }

  CMatrix dense() const {
    const auto d = static_cast<Eigen::Index>(dim);
    CMatrix m = CMatrix::Zero(d, d);
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = entry(i, j);
    return m;
  }

  // Nonzero entries (i, j, value).
  struct Nz {
    std::size_t i, j;
    cplx v;
  };
  std::vector<Nz> nonzeros() const {
    std::vector<Nz> out;
    auto diag = [&](long m, cplx c) {
      if (c == 0.0 || static_cast<std::size_t>(std::labs(m)) >= dim) return;
      for (std::size_t i = 0; i < dim; ++i) {
        const long j = static_cast<long>(i) + m;
        if (j >= 0 && j < static_cast<long>(dim)) out.push_back({i, static_cast<std::size_t>(j), c});
      }
    };
    diag(offset, w.d0);
    diag(offset + 1, std::conj(w.d1));
    diag(offset - 1, w.d1);
    return out;
  }
};

inline cplx trace_inner(const PhiMatrix& phi, const HermitianMatrix& p) {
  if (phi.dim != p.dim()) throw DimensionError("trace_inner dimension mismatch");
  cplx s = 0.0;
  for (const auto& nz : phi.nonzeros()) s += nz.v * p(nz.j, nz.i);
  return s;
}

struct SegmentLmiTemplate {
  long n = 0;
  ElementaryToeplitz theta;  // dimension K+1
  PhiMatrix phi;             // dimension K
};

inline std::vector<SegmentLmiTemplate> build_segment_lmi(std::size_t k, const SegmentWeights& w) {
  std::vector<SegmentLmiTemplate> out;
  for (std::size_t n = 0; n <= k; ++n) {
    const long nl = static_cast<long>(n);
    out.push_back({nl, ElementaryToeplitz{k + 1, nl}, PhiMatrix{k, nl, w}});
  }
  return out;
}

struct BandPeak {
  double f = 0.0;
  double value = 0.0;
};

// Global max of |H(f)| on [-f_R, f_R].
inline BandPeak sup_modulus_on_band(const CausalTrigPoly& h, double f_r) {
  if (!(f_r > 0.0 && f_r <= 0.5)) throw DomainError("band half-width must lie in (0, 1/2]");
  const std::size_t npts = std::max<std::size_t>(4096, 64 * (h.degree() + 1));
  std::vector<double> grid(npts), val(npts);
  for (std::size_t i = 0; i < npts; ++i) {
    grid[i] = i + 1 == npts ? f_r : -f_r + 2.0 * f_r * static_cast<double>(i) / static_cast<double>(npts - 1);
    val[i] = h.modulus(grid[i]);
  }
  const double top = *std::max_element(val.begin(), val.end());
  BandPeak best{grid[std::max_element(val.begin(), val.end()) - val.begin()], top};

  // Refine every local grid maximum that could still overtake the best one.
  const double slack = 1e-3 * (top + 1e-300);
  for (std::size_t i = 0; i < npts; ++i) {
    const bool left_ok = i == 0 || val[i] >= val[i - 1];
    const bool right_ok = i + 1 == npts || val[i] >= val[i + 1];
    if (!left_ok || !right_ok || val[i] < top - slack) continue;
    double a = grid[i == 0 ? 0 : i - 1];
    double b = grid[i + 1 == npts ? npts - 1 : i + 1];
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - invphi * (b - a), d = a + invphi * (b - a);
    double fc = h.modulus(c), fd = h.modulus(d);
    while (b - a > 1e-13) {
      if (fc >= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - invphi * (b - a);
        fc = h.modulus(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + invphi * (b - a);
        fd = h.modulus(d);
      }
    }
    for (double f : {a, b, 0.5 * (a + b), grid[i]}) {
      const double v = h.modulus(f);
      if (v > best.value) best = {f, v};
    }
  }
  return best;
}

struct SegmentBoundCertificate {
  double gamma = 0.0;
  HermitianMatrix q;  // K+1
  HermitianMatrix p;  // K (empty when K = 0)
  std::vector<cplx> h;
};

// Largest violation of the Gram-pair equalities and of the bordered PSD block.
struct CertificateResidual {
  double equality = 0.0;
  double psd = 0.0;  // max(0, -lambda_min([[Q,h],[h^H,1]]))
};

inline CertificateResidual certificate_residual(const SegmentBoundCertificate& c, const SegmentWeights& w) {
  CertificateResidual r;
  const std::size_t k = c.h.size() - 1;
  for (const auto& t : build_segment_lmi(k, w)) {
    cplx lhs = trace_inner(t.theta, c.q);
    if (k > 0) lhs += trace_inner(t.phi, c.p);
    const double rhs = t.n == 0 ? c.gamma * c.gamma : 0.0;
    r.equality = std::max(r.equality, std::abs(lhs - rhs));
  }
  const auto d = static_cast<Eigen::Index>(k + 2);
  CMatrix b = CMatrix::Zero(d, d);
  b.topLeftCorner(d - 1, d - 1) = c.q.dense();
  for (std::size_t m = 0; m <= k; ++m) {
    b(static_cast<Eigen::Index>(m), d - 1) = c.h[m];
    b(d - 1, static_cast<Eigen::Index>(m)) = std::conj(c.h[m]);
  }
  b(d - 1, d - 1) = 1.0;
  r.psd = std::max(0.0, -lambda_min(HermitianMatrix::from_upper(b)));
  return r;
}

// Rows  Tr(Theta^(n) Q) + Tr(Phi^(n) P) = rhs_n  for n = 0..K, where Q is the
// leading (K+1)x(K+1) part of `q`. rhs_0 is gamma_sq, or the scalar variable
// t_var when given; rhs_n = 0 otherwise. The imaginary row for n = 0 vanishes
// identically and is not emitted.
inline void add_segment_lmi_rows(conic::ConicProblem& prob, const conic::HermitianBlock& q,
                                 const std::optional<conic::HermitianBlock>& p, std::size_t k,
                                 const SegmentWeights& w, double gamma_sq, std::optional<std::size_t> t_var) {
  using conic::kNoRow;
  for (const auto& tpl : build_segment_lmi(k, w)) {
    const std::size_t n = static_cast<std::size_t>(tpl.n);
    const std::size_t re = prob.add_row(n == 0 && !t_var ? gamma_sq : 0.0);
    const std::size_t im = n == 0 ? kNoRow : prob.add_row(0.0);
    for (std::size_t i = 0; i + n <= k; ++i) conic::add_hermitian_entry(prob, q, re, im, i + n, i, 1.0);
    if (p && k > 0)
      for (const auto& nz : tpl.phi.nonzeros()) conic::add_hermitian_entry(prob, *p, re, im, nz.j, nz.i, nz.v);
    if (n == 0 && t_var) prob.add_term(re, *t_var, -1.0);
  }
}

// Bordered block [[Q, h], [h^H, 1]] of dimension K+2 with its corner fixed to 1.
inline conic::HermitianBlock add_bordered_block(conic::ConicProblem& prob, std::size_t k) {
  const auto b = conic::add_hermitian_psd(prob, k + 2);
  const std::size_t r = prob.add_row(1.0);
  conic::add_hermitian_entry(prob, b, r, conic::kNoRow, k + 1, k + 1, 1.0);
  return b;
}

enum class CertifyStatus { Feasible, Infeasible };

struct CertifyResult {
  CertifyStatus status = CertifyStatus::Infeasible;
  std::optional<SegmentBoundCertificate> certificate;
  int iterations = 0;
};

// Decides |H(f)| <= gamma on [-f_R, f_R] through the Gram-pair LMI.
inline CertifyResult certify_bound(const CausalTrigPoly& h, double gamma, double f_r,
                                   const conic::SolverOptions& opt = {}) {
  if (!(gamma >= 0.0)) throw DomainError("gamma must be nonnegative");
  const SegmentWeights w = segment_weights(f_r);
  const std::size_t k = h.degree();
  CertifyResult res;
  if (gamma == 0.0) {
    const bool zero = std::all_of(h.coeffs().begin(), h.coeffs().end(), [](cplx c) { return c == 0.0; });
    res.status = zero ? CertifyStatus::Feasible : CertifyStatus::Infeasible;
    if (zero) {
      const auto kk = static_cast<Eigen::Index>(k);
      res.certificate = SegmentBoundCertificate{0.0, HermitianMatrix::from_upper(CMatrix::Zero(kk + 1, kk + 1)),
                                                HermitianMatrix::from_upper(CMatrix::Zero(kk, kk)), h.coeffs()};
    }
    return res;
  }

  conic::ConicProblem prob;
  const auto q = add_bordered_block(prob, k);
  std::optional<conic::HermitianBlock> p;
  if (k > 0) p = conic::add_hermitian_psd(prob, k);
  for (std::size_t m = 0; m <= k; ++m) {
    const cplx hm = h.coeffs()[m];
    const std::size_t re = prob.add_row(hm.real());
    const std::size_t im = prob.add_row(hm.imag());
    conic::add_hermitian_entry(prob, q, re, im, m, k + 1, 1.0);
  }
  add_segment_lmi_rows(prob, q, p, k, w, gamma * gamma, std::nullopt);

  const auto out = conic::solve(prob, std::nullopt, opt);
  res.iterations = out.iterations;
  if (out.status == conic::SolveStatus::PrimalInfeasible) {
    res.status = CertifyStatus::Infeasible;
    return res;
  }
  if (out.status != conic::SolveStatus::Optimal)
    throw SolverStall(std::string("bound certification: ") + conic::to_string(out.status) + " " + out.message);
  const HermitianMatrix border = conic::hermitian_value(prob, out.x, q);
  const auto kk = static_cast<Eigen::Index>(k);
  SegmentBoundCertificate cert{gamma, HermitianMatrix::from_upper(border.dense().topLeftCorner(kk + 1, kk + 1)),
                               p ? conic::hermitian_value(prob, out.x, *p)
                                 : HermitianMatrix::from_upper(CMatrix::Zero(0, 0)),
                               h.coeffs()};
  res.status = CertifyStatus::Feasible;
  res.certificate = std::move(cert);
  return res;
}

}  // namespace dtafopt
