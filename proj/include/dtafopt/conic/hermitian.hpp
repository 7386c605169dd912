#pragma once

// Complex Hermitian PSD variables through the real embedding
//   Y = [[Re X, -Im X], [Im X, Re X]],  Y in S^{2M}_+.
// Linear functionals read X back as the average of the two copies,
//   X = (Y11 + Y22)/2 + j (Y21 - Y12)/2,
// which is PSD whenever Y is.

#include <complex>
#include <cstddef>

#include "dtafopt/conic/problem.hpp"
#include "dtafopt/linalg.hpp"

namespace dtafopt::conic {

struct HermitianBlock {
  std::size_t block = 0;
  std::size_t dim = 0;
};

inline HermitianBlock add_hermitian_psd(ConicProblem& p, std::size_t dim) {
  return {p.add_psd(2 * dim), dim};
}

inline constexpr std::size_t kNoRow = static_cast<std::size_t>(-1);

// Adds Re(c * X(i,j)) to row_re and Im(c * X(i,j)) to row_im (either may be kNoRow).
inline void add_hermitian_entry(ConicProblem& p, const HermitianBlock& h, std::size_t row_re, std::size_t row_im,
                                std::size_t i, std::size_t j, cplx c) {
  const std::size_t m = h.dim;
  const double cr = c.real(), ci = c.imag();
  // X(i,j) = (Y[i,j] + Y[m+i,m+j])/2 + j (Y[m+i,j] - Y[i,m+j])/2
  if (row_re != kNoRow) {
    if (cr != 0.0) {
      p.add_matrix_entry(row_re, h.block, i, j, 0.5 * cr);
      p.add_matrix_entry(row_re, h.block, m + i, m + j, 0.5 * cr);
    }
    if (ci != 0.0) {
      p.add_matrix_entry(row_re, h.block, m + i, j, -0.5 * ci);
      p.add_matrix_entry(row_re, h.block, i, m + j, 0.5 * ci);
    }
  }
  if (row_im != kNoRow) {
    if (cr != 0.0) {
      p.add_matrix_entry(row_im, h.block, m + i, j, 0.5 * cr);
      p.add_matrix_entry(row_im, h.block, i, m + j, -0.5 * cr);
    }
    if (ci != 0.0) {
      p.add_matrix_entry(row_im, h.block, i, j, 0.5 * ci);
      p.add_matrix_entry(row_im, h.block, m + i, m + j, 0.5 * ci);
    }
  }
}

// Objective term Re(c * X(i,j)).
inline void add_hermitian_objective(ConicProblem& p, const HermitianBlock& h, std::size_t i, std::size_t j, cplx c) {
  const std::size_t m = h.dim;
  if (c.real() != 0.0) {
    p.add_objective_matrix_entry(h.block, i, j, 0.5 * c.real());
    p.add_objective_matrix_entry(h.block, m + i, m + j, 0.5 * c.real());
  }
  if (c.imag() != 0.0) {
    p.add_objective_matrix_entry(h.block, m + i, j, -0.5 * c.imag());
    p.add_objective_matrix_entry(h.block, i, m + j, 0.5 * c.imag());
  }
}

inline HermitianMatrix hermitian_value(const ConicProblem& p, const std::vector<double>& x, const HermitianBlock& h) {
  return real_unembed(p.block_matrix(x, h.block));
}

}  // namespace dtafopt::conic
