#pragma once

// Standard-form conic problem:
//
//   minimize  <c, x>   subject to  A x = b,  x in K
//
// K is an ordered product of nonnegative orthants, free blocks and real
// symmetric PSD blocks. Each PSD block of dimension d is scalarized as the
// scaled upper triangle svec(Y) (off-diagonals times sqrt(2)), so that
// svec(C) . svec(Y) = <C, Y>.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dtafopt/errors.hpp"

namespace dtafopt::conic {

enum class ConeKind { Nonneg, Free, Psd };

struct ConeBlock {
  ConeKind kind = ConeKind::Nonneg;
  std::size_t size = 0;  // count for Nonneg/Free, matrix dimension for Psd

  std::size_t scalar_size() const { return kind == ConeKind::Psd ? size * (size + 1) / 2 : size; }
};

struct Term {
  std::size_t var = 0;
  double coef = 0.0;
};

inline constexpr double kSqrt2 = 1.41421356237309504880;

class ConicProblem {
 public:
  std::size_t add_nonneg(std::size_t count) { return add_block({ConeKind::Nonneg, count}); }
  std::size_t add_free(std::size_t count) { return add_block({ConeKind::Free, count}); }
  std::size_t add_psd(std::size_t dim) { return add_block({ConeKind::Psd, dim}); }

  const std::vector<ConeBlock>& cones() const { return cones_; }
  std::size_t num_blocks() const { return cones_.size(); }
  std::size_t block_offset(std::size_t k) const { return offsets_.at(k); }
  std::size_t num_vars() const { return c_.size(); }
  std::size_t num_rows() const { return rows_.size(); }

  // Scalar index of entry i of a Nonneg/Free block.
  std::size_t var(std::size_t block, std::size_t i) const {
    const auto& cb = cones_.at(block);
    if (cb.kind == ConeKind::Psd || i >= cb.size) throw DimensionError("bad scalar variable index");
    return offsets_[block] + i;
  }

  // svec index of entry (i, j) of a PSD block (either order).
  std::size_t var(std::size_t block, std::size_t i, std::size_t j) const {
    const auto& cb = cones_.at(block);
    if (cb.kind != ConeKind::Psd || i >= cb.size || j >= cb.size) throw DimensionError("bad matrix variable index");
    return offsets_[block] + svec_position(cb.size, i, j);
  }

  // Column-major upper triangle ordering: (0,0), (0,1), (1,1), (0,2), ...
  static std::size_t svec_position(std::size_t /*dim*/, std::size_t i, std::size_t j) {
    if (i > j) std::swap(i, j);
    return j * (j + 1) / 2 + i;
  }

  std::size_t add_row(double rhs) {
    rows_.emplace_back();
    b_.push_back(rhs);
    return rows_.size() - 1;
  }

  void add_term(std::size_t row, std::size_t var, double coef) {
    if (var >= c_.size()) throw DimensionError("term variable out of range");
    rows_.at(row).push_back({var, coef});
  }

  // Adds coef * Y(i, j) to the row, Y the symmetric matrix of a PSD block.
  void add_matrix_entry(std::size_t row, std::size_t block, std::size_t i, std::size_t j, double coef) {
    const std::size_t v = var(block, i, j);
    add_term(row, v, i == j ? coef : coef / kSqrt2);
  }

  void set_rhs(std::size_t row, double rhs) { b_.at(row) = rhs; }
  double rhs(std::size_t row) const { return b_.at(row); }
  const std::vector<double>& rhs() const { return b_; }

  void set_objective(std::size_t var, double coef) { c_.at(var) = coef; }
  void add_objective_matrix_entry(std::size_t block, std::size_t i, std::size_t j, double coef) {
    c_.at(var(block, i, j)) += i == j ? coef : coef / kSqrt2;
  }
  const std::vector<double>& objective() const { return c_; }

  // Terms of a row, sorted by variable with duplicates merged.
  const std::vector<Term>& row(std::size_t r) const {
    auto& terms = rows_.at(r);
    if (!std::is_sorted(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.var < b.var; }) ||
        std::adjacent_find(terms.begin(), terms.end(),
                           [](const Term& a, const Term& b) { return a.var == b.var; }) != terms.end()) {
      std::stable_sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.var < b.var; });
      std::vector<Term> merged;
      for (const auto& t : terms) {
        if (!merged.empty() && merged.back().var == t.var)
          merged.back().coef += t.coef;
        else
          merged.push_back(t);
      }
      std::erase_if(merged, [](const Term& t) { return t.coef == 0.0; });
      terms = std::move(merged);
    }
    return terms;
  }

  // Dense symmetric matrix of PSD block `block` from a scalarized vector.
  Eigen::MatrixXd block_matrix(const std::vector<double>& x, std::size_t block) const {
    const auto& cb = cones_.at(block);
    if (cb.kind != ConeKind::Psd) throw DimensionError("block is not PSD");
    const auto d = static_cast<Eigen::Index>(cb.size);
    Eigen::MatrixXd m(d, d);
    for (std::size_t j = 0; j < cb.size; ++j)
      for (std::size_t i = 0; i <= j; ++i) {
        double v = x.at(offsets_[block] + svec_position(cb.size, i, j));
        if (i != j) v /= kSqrt2;
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
      }
    return m;
  }

  double scalar_value(const std::vector<double>& x, std::size_t block, std::size_t i) const {
    return x.at(var(block, i));
  }

 private:
  std::size_t add_block(ConeBlock cb) {
    if (cb.size == 0) throw MalformedProblem("cone blocks must be nonempty");
    offsets_.push_back(c_.size());
    cones_.push_back(cb);
    c_.resize(c_.size() + cb.scalar_size(), 0.0);
    return cones_.size() - 1;
  }

  std::vector<ConeBlock> cones_;
  std::vector<std::size_t> offsets_;
  std::vector<double> c_;
  mutable std::vector<std::vector<Term>> rows_;
  std::vector<double> b_;
};

struct Diagnostics {
  std::size_t rows = 0;
  std::size_t rank = 0;
  std::size_t vars = 0;
  std::size_t nnz = 0;
  std::size_t nonneg = 0;
  std::size_t free = 0;
  std::vector<std::size_t> psd_dims;
  std::vector<std::size_t> redundant_rows;  // rows dependent on earlier pivots
  std::vector<std::size_t> inconsistent_rows;
};

struct RowReduction {
  std::vector<std::size_t> kept;
  std::vector<std::size_t> redundant;
  // For each redundant row r: coefficients c over `kept` with a_r ~= sum c_k a_k
  // (rows taken after unit-norm scaling).
  std::vector<std::vector<double>> combos;
};

inline double row_norm(const std::vector<Term>& t) {
  double s = 0.0;
  for (const auto& x : t) s += x.coef * x.coef;
  return std::sqrt(s);
}

// Greedy pivoted Cholesky on the Gram matrix of unit-normalized rows. A row is
// redundant once its remaining pivot (squared distance to the span of chosen
// rows) falls to 1e-10 or below.
inline RowReduction reduce_rows(const ConicProblem& p, double pivot_tol = 1e-10) {
  const std::size_t m = p.num_rows();
  RowReduction red;
  if (m == 0) return red;
  std::vector<double> norms(m);
  std::vector<std::vector<std::pair<std::size_t, double>>> cols(p.num_vars());
  for (std::size_t r = 0; r < m; ++r) {
    const auto& t = p.row(r);
    norms[r] = row_norm(t);
    for (const auto& term : t) cols[term.var].push_back({r, term.coef / (norms[r] > 0 ? norms[r] : 1.0)});
  }
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (const auto& col : cols)
    for (const auto& [ri, vi] : col)
      for (const auto& [rj, vj] : col)
        if (rj <= ri) g(static_cast<Eigen::Index>(ri), static_cast<Eigen::Index>(rj)) += vi * vj;
  g = g.selfadjointView<Eigen::Lower>();

  // Pivot in natural order, which keeps results deterministic and
  // attributes redundancy to later rows.
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  std::vector<std::size_t> chosen;
  for (std::size_t r = 0; r < m; ++r) {
    const auto ri = static_cast<Eigen::Index>(r);
    // project row r on chosen rows
    Eigen::VectorXd lr(static_cast<Eigen::Index>(chosen.size()));
    for (std::size_t k = 0; k < chosen.size(); ++k) {
      const auto ck = static_cast<Eigen::Index>(chosen[k]);
      double s = g(ri, ck);
      for (std::size_t q = 0; q < k; ++q) s -= lr[static_cast<Eigen::Index>(q)] * l(ck, static_cast<Eigen::Index>(q));
      lr[static_cast<Eigen::Index>(k)] = s / l(ck, static_cast<Eigen::Index>(k));
    }
    const double rem = g(ri, ri) - lr.squaredNorm();
    if (norms[r] == 0.0 || rem <= pivot_tol) {
      // solve L_chosen^T c = lr
      Eigen::VectorXd c = lr;
      for (std::size_t kk = chosen.size(); kk-- > 0;) {
        const auto k = static_cast<Eigen::Index>(kk);
        for (std::size_t q = kk + 1; q < chosen.size(); ++q)
          c[k] -= l(static_cast<Eigen::Index>(chosen[q]), k) * c[static_cast<Eigen::Index>(q)];
        c[k] /= l(static_cast<Eigen::Index>(chosen[kk]), k);
      }
      red.redundant.push_back(r);
      red.combos.emplace_back(c.data(), c.data() + c.size());
      continue;
    }
    for (std::size_t k = 0; k < chosen.size(); ++k) l(ri, static_cast<Eigen::Index>(k)) = lr[static_cast<Eigen::Index>(k)];
    l(ri, static_cast<Eigen::Index>(chosen.size())) = std::sqrt(rem);
    chosen.push_back(r);
  }
  red.kept = chosen;
  return red;
}

// Structural report; rejects non-finite data.
inline Diagnostics assemble_check(const ConicProblem& p) {
  Diagnostics d;
  d.rows = p.num_rows();
  d.vars = p.num_vars();
  for (const auto& cb : p.cones()) {
    if (cb.kind == ConeKind::Nonneg) d.nonneg += cb.size;
    if (cb.kind == ConeKind::Free) d.free += cb.size;
    if (cb.kind == ConeKind::Psd) d.psd_dims.push_back(cb.size);
  }
  for (double v : p.objective())
    if (!std::isfinite(v)) throw MalformedProblem("non-finite objective coefficient");
  for (std::size_t r = 0; r < p.num_rows(); ++r) {
    if (!std::isfinite(p.rhs(r))) throw MalformedProblem("non-finite right-hand side in row " + std::to_string(r));
    for (const auto& t : p.row(r)) {
      if (!std::isfinite(t.coef)) throw MalformedProblem("non-finite coefficient in row " + std::to_string(r));
      ++d.nnz;
    }
  }
  auto red = reduce_rows(p);
  d.rank = red.kept.size();
  d.redundant_rows = red.redundant;
  for (std::size_t k = 0; k < red.redundant.size(); ++k) {
    const std::size_t r = red.redundant[k];
    double nr = row_norm(p.row(r));
    double resid = nr > 0 ? p.rhs(r) / nr : p.rhs(r);
    for (std::size_t q = 0; q < red.kept.size(); ++q) {
      double nq = row_norm(p.row(red.kept[q]));
      resid -= red.combos[k][q] * p.rhs(red.kept[q]) / nq;
    }
    if (std::abs(resid) > 1e-9 * (1.0 + std::abs(p.rhs(r)))) d.inconsistent_rows.push_back(r);
  }
  return d;
}

// Line-oriented text dump:
//   conic v1
//   cones <k>            then k lines "nonneg n" | "free n" | "psd d"
//   objective <nnz>      then nnz lines "<var> <value>"
//   rows <m>             then m lines "<rhs> <nnz> <var>:<value> ..."
// Values are printed with 17 significant digits so they round-trip exactly.
inline void dump(const ConicProblem& p, std::ostream& os) {
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  os << "conic v1\n";
  os << "cones " << p.num_blocks() << "\n";
  for (const auto& cb : p.cones()) {
    const char* name = cb.kind == ConeKind::Nonneg ? "nonneg" : cb.kind == ConeKind::Free ? "free" : "psd";
    os << name << " " << cb.size << "\n";
  }
  std::size_t nnz = 0;
  for (double v : p.objective()) nnz += v != 0.0;
  os << "objective " << nnz << "\n";
  for (std::size_t i = 0; i < p.num_vars(); ++i)
    if (p.objective()[i] != 0.0) os << i << " " << num(p.objective()[i]) << "\n";
  os << "rows " << p.num_rows() << "\n";
  for (std::size_t r = 0; r < p.num_rows(); ++r) {
    const auto& t = p.row(r);
    os << num(p.rhs(r)) << " " << t.size();
    for (const auto& term : t) os << " " << term.var << ":" << num(term.coef);
    os << "\n";
  }
}

inline ConicProblem load(std::istream& is) {
  auto fail = [](const std::string& what) -> MalformedProblem { return MalformedProblem("conic load: " + what); };
  std::string word;
  std::string version;
  if (!(is >> word >> version) || word != "conic" || version != "v1") throw fail("missing 'conic v1' header");
  ConicProblem p;
  std::size_t k = 0;
  if (!(is >> word >> k) || word != "cones") throw fail("expected cones section");
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t n = 0;
    if (!(is >> word >> n)) throw fail("truncated cones section");
    if (word == "nonneg")
      p.add_nonneg(n);
    else if (word == "free")
      p.add_free(n);
    else if (word == "psd")
      p.add_psd(n);
    else
      throw fail("unknown cone '" + word + "'");
  }
  std::size_t nnz = 0;
  if (!(is >> word >> nnz) || word != "objective") throw fail("expected objective section");
  for (std::size_t i = 0; i < nnz; ++i) {
    std::size_t v = 0;
    double c = 0;
    if (!(is >> v >> c) || v >= p.num_vars()) throw fail("bad objective entry");
    p.set_objective(v, c);
  }
  std::size_t m = 0;
  if (!(is >> word >> m) || word != "rows") throw fail("expected rows section");
  for (std::size_t r = 0; r < m; ++r) {
    double rhs = 0;
    std::size_t cnt = 0;
    if (!(is >> rhs >> cnt)) throw fail("bad row header");
    const std::size_t row = p.add_row(rhs);
    for (std::size_t i = 0; i < cnt; ++i) {
      if (!(is >> word)) throw fail("truncated row");
      const auto colon = word.find(':');
      if (colon == std::string::npos) throw fail("bad term '" + word + "'");
      const std::size_t v = std::stoul(word.substr(0, colon));
      const double c = std::stod(word.substr(colon + 1));
      if (v >= p.num_vars()) throw fail("term variable out of range");
      p.add_term(row, v, c);
    }
  }
  return p;
}

}  // namespace dtafopt::conic
