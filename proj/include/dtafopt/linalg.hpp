#pragma once

// Dense complex vectors and Hermitian matrices.
//
// HermitianMatrix keeps the upper triangle as the source of truth; the lower
// triangle is regenerated from it on every construction so the two halves can
// never drift apart.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "dtafopt/errors.hpp"

namespace dtafopt {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using CVector = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;

class ComplexSequence {
 public:
  ComplexSequence() = default;

  explicit ComplexSequence(std::vector<cplx> entries) : entries_(std::move(entries)) {
    if (entries_.empty()) throw DimensionError("sequence length must be >= 1");
  }

  // Builds a sequence and flags it unimodular; every entry must have
  // modulus within 1e-9 of one.
  static ComplexSequence unimodular(std::vector<cplx> entries) {
    ComplexSequence s(std::move(entries));
    if (!s.check_unimodular(1e-9)) throw DomainError("sequence is not unimodular");
    s.unimodular_ = true;
    return s;
  }

  std::size_t size() const { return entries_.size(); }
  const cplx& operator[](std::size_t i) const { return entries_[i]; }
  std::span<const cplx> entries() const { return entries_; }
  bool flagged_unimodular() const { return unimodular_; }

  bool check_unimodular(double tol = 1e-9) const {
    return std::all_of(entries_.begin(), entries_.end(),
                       [tol](cplx v) { return std::abs(std::abs(v) - 1.0) <= tol; });
  }

  // Largest | |x_n| - 1 |.
  double modulus_deviation() const {
    double d = 0.0;
    for (auto v : entries_) d = std::max(d, std::abs(std::abs(v) - 1.0));
    return d;
  }

  // x_n <- x_n / |x_n|; zero entries become 1.
  ComplexSequence projected_unimodular() const {
    std::vector<cplx> out(entries_.size());
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      double m = std::abs(entries_[i]);
      out[i] = m > 0.0 ? entries_[i] / m : cplx(1.0, 0.0);
    }
    return unimodular(std::move(out));
  }

  CVector to_vector() const {
    CVector v(static_cast<Eigen::Index>(entries_.size()));
    for (std::size_t i = 0; i < entries_.size(); ++i) v[static_cast<Eigen::Index>(i)] = entries_[i];
    return v;
  }

 private:
  std::vector<cplx> entries_;
  bool unimodular_ = false;
};

class HermitianMatrix {
 public:
  HermitianMatrix() = default;

  // Takes the upper triangle of `a`; the lower triangle must agree with it to
  // within `tol * (1 + max|a|)` or InvalidMatrix is thrown.
  explicit HermitianMatrix(const CMatrix& a, double tol = 1e-10) {
    if (a.rows() != a.cols()) throw DimensionError("Hermitian matrix must be square");
    const double scale = 1.0 + (a.size() ? a.cwiseAbs().maxCoeff() : 0.0);
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      for (Eigen::Index j = i; j < a.cols(); ++j) {
        if (std::abs(a(i, j) - std::conj(a(j, i))) > tol * scale)
          throw InvalidMatrix("matrix is not Hermitian at (" + std::to_string(i) + "," +
                              std::to_string(j) + ")");
      }
    }
    m_ = a;
    sync_lower();
  }

  static HermitianMatrix from_upper(const CMatrix& a) {
    HermitianMatrix h;
    h.m_ = a;
    h.sync_lower();
    return h;
  }

  static HermitianMatrix identity(std::size_t m) {
    return from_upper(CMatrix::Identity(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m)));
  }

  static HermitianMatrix diagonal(std::span<const double> d) {
    CMatrix a = CMatrix::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
    for (std::size_t i = 0; i < d.size(); ++i) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = d[i];
    return from_upper(a);
  }

  static HermitianMatrix outer(const CVector& v) { return from_upper(v * v.adjoint()); }

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  cplx operator()(std::size_t i, std::size_t j) const {
    return m_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  const CMatrix& dense() const { return m_; }

  double frobenius_norm() const { return m_.norm(); }
  double trace() const { return m_.diagonal().real().sum(); }

  friend HermitianMatrix operator+(const HermitianMatrix& a, const HermitianMatrix& b) {
    if (a.dim() != b.dim()) throw DimensionError("dimension mismatch in sum");
    return from_upper(a.m_ + b.m_);
  }
  friend HermitianMatrix operator*(double s, const HermitianMatrix& a) { return from_upper(s * a.m_); }

 private:
  void sync_lower() {
    for (Eigen::Index i = 0; i < m_.rows(); ++i) {
      m_(i, i) = cplx(m_(i, i).real(), 0.0);
      for (Eigen::Index j = 0; j < i; ++j) m_(i, j) = std::conj(m_(j, i));
    }
  }

  CMatrix m_;
};

// Theta_M^(m): ones on the m-th superdiagonal (m > 0), |m|-th subdiagonal
// (m < 0), zero matrix when |m| >= M.
struct ElementaryToeplitz {
  std::size_t dim = 0;
  long offset = 0;

  double entry(std::size_t i, std::size_t j) const {
    if (static_cast<std::size_t>(std::labs(offset)) >= dim) return 0.0;
    return static_cast<long>(j) - static_cast<long>(i) == offset ? 1.0 : 0.0;
  }

  ElementaryToeplitz transposed() const { return {dim, -offset}; }

  RMatrix dense() const {
    RMatrix t = RMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < dim; ++i) {
      long j = static_cast<long>(i) + offset;
      if (j >= 0 && j < static_cast<long>(dim) && static_cast<std::size_t>(std::labs(offset)) < dim)
        t(static_cast<Eigen::Index>(i), j) = 1.0;
    }
    return t;
  }
};

struct EigenDecomposition {
  std::vector<double> values;  // descending
  CMatrix vectors;             // unitary, column k pairs with values[k]
};

// Cyclic complex Jacobi. Stops once the off-diagonal Frobenius norm drops to
// 1e-13 * ||A||_F (or exactly zero), at most 60 sweeps.
inline EigenDecomposition eig_hermitian(const HermitianMatrix& herm) {
  const auto n = static_cast<Eigen::Index>(herm.dim());
  if (herm.dim() > 512) throw DimensionError("eig_hermitian supports dimension <= 512");
  CMatrix a = herm.dense();
  CMatrix v = CMatrix::Identity(n, n);
  const double norm = a.norm();
  const double threshold = 1e-13 * norm;

  auto off_norm = [&]() {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) s += 2.0 * std::norm(a(i, j));
    return std::sqrt(s);
  };

  for (int sweep = 0; sweep < 60; ++sweep) {
    double off = off_norm();
    if (off == 0.0 || off <= threshold) break;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double b = std::abs(a(p, q));
        if (b == 0.0) continue;
        const cplx phase = a(p, q) / b;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double theta = (aqq - app) / (2.0 * b);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // J = diag(1, conj(phase)) * [[c, s], [-s, c]] on the (p, q) plane.
        const cplx jpp = c, jpq = s;
        const cplx jqp = -s * std::conj(phase), jqq = c * std::conj(phase);
        for (Eigen::Index k = 0; k < n; ++k) {
          const cplx akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * jpp + akq * jqp;
          a(k, q) = akp * jpq + akq * jqq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const cplx apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
          a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = app - t * b;
        a(q, q) = aqq + t * b;
        for (Eigen::Index k = 0; k < n; ++k) {
          const cplx vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * jpp + vkq * jqp;
          v(k, q) = vkp * jpq + vkq * jqq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return a(x, x).real() > a(y, y).real(); });

  EigenDecomposition out;
  out.values.resize(static_cast<std::size_t>(n));
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    out.values[static_cast<std::size_t>(k)] = a(src, src).real();
    CVector col = v.col(src);
    // Phase convention: first entry of (numerically) largest modulus made real >= 0.
    const double big = col.cwiseAbs().maxCoeff();
    Eigen::Index lead = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(col[i]) >= big * (1.0 - 1e-12)) {
        lead = i;
        break;
      }
    }
    if (big > 0.0) col *= std::conj(col[lead]) / std::abs(col[lead]);
    col[lead] = cplx(col[lead].real(), 0.0);
    out.vectors.col(k) = col;
  }
  return out;
}

// Tr(A B).
inline cplx trace_inner(const HermitianMatrix& a, const HermitianMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionError("trace_inner dimension mismatch");
  // sum_ij A_ij B_ji
  return (a.dense().cwiseProduct(b.dense().transpose())).sum();
}

// Tr(Theta^(m) B) = sum_i B(i+m, i).
inline cplx trace_inner(const ElementaryToeplitz& t, const HermitianMatrix& b) {
  if (t.dim != b.dim()) throw DimensionError("trace_inner dimension mismatch");
  cplx s = 0.0;
  if (static_cast<std::size_t>(std::labs(t.offset)) >= t.dim) return s;
  for (std::size_t i = 0; i < t.dim; ++i) {
    long r = static_cast<long>(i) + t.offset;
    if (r >= 0 && r < static_cast<long>(t.dim)) s += b(static_cast<std::size_t>(r), i);
  }
  return s;
}

// [[Re A, -Im A], [Im A, Re A]].
inline RMatrix real_embed(const HermitianMatrix& a) {
  const auto m = static_cast<Eigen::Index>(a.dim());
  RMatrix e(2 * m, 2 * m);
  const RMatrix re = a.dense().real();
  const RMatrix im = a.dense().imag();
  e.topLeftCorner(m, m) = re;
  e.topRightCorner(m, m) = -im;
  e.bottomLeftCorner(m, m) = im;
  e.bottomRightCorner(m, m) = re;
  return e;
}

// Inverse map of real_embed, averaged so that any real symmetric 2M x 2M
// matrix Y maps to a Hermitian matrix; Y PSD implies the result is PSD.
inline HermitianMatrix real_unembed(const RMatrix& y) {
  if (y.rows() != y.cols() || y.rows() % 2 != 0) throw DimensionError("embedding must be 2M x 2M");
  const Eigen::Index m = y.rows() / 2;
  RMatrix re = 0.5 * (y.topLeftCorner(m, m) + y.bottomRightCorner(m, m));
  RMatrix im = 0.5 * (y.bottomLeftCorner(m, m) - y.topRightCorner(m, m));
  CMatrix c(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) c(i, j) = cplx(0.5 * (re(i, j) + re(j, i)), 0.5 * (im(i, j) - im(j, i)));
  return HermitianMatrix::from_upper(c);
}

struct NotPsd {
  std::size_t pivot = 0;
};

// L with A + shift I = L L^H, or the first pivot that is not strictly positive.
inline std::variant<CMatrix, NotPsd> cholesky_psd(const HermitianMatrix& a, double shift = 0.0) {
  const auto n = static_cast<Eigen::Index>(a.dim());
  CMatrix l = CMatrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double d = a(static_cast<std::size_t>(j), static_cast<std::size_t>(j)).real() + shift;
    for (Eigen::Index k = 0; k < j; ++k) d -= std::norm(l(j, k));
    if (!(d > 0.0)) return NotPsd{static_cast<std::size_t>(j)};
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      cplx s = a(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      for (Eigen::Index k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
      l(i, j) = s / ljj;
    }
  }
  return l;
}

inline double lambda_min(const HermitianMatrix& a) { return eig_hermitian(a).values.back(); }

// PSD test used for flagged matrices: every eigenvalue >= -1e-9 (|trace| + 1).
inline bool is_psd(const HermitianMatrix& a) {
  if (a.dim() == 0) return true;
  return lambda_min(a) >= -1e-9 * (std::abs(a.trace()) + 1.0);
}

}  // namespace dtafopt
