#pragma once

#include "dtafopt/conic/hermitian.hpp"
#include "dtafopt/conic/problem.hpp"

namespace examples {

using dtafopt::conic::ConicProblem;

// min x  s.t.  x - s = 3, s >= 0, x free.
inline ConicProblem lp_corner() {
  ConicProblem p;
  const auto fb = p.add_free(1);
  const auto nb = p.add_nonneg(1);
  const auto r = p.add_row(3.0);
  p.add_term(r, p.var(fb, 0), 1.0);
  p.add_term(r, p.var(nb, 0), -1.0);
  p.set_objective(p.var(fb, 0), 1.0);
  return p;
}

// min t  s.t.  t I - diag(2, -1) = Y psd.
inline ConicProblem lambda_max_epigraph() {
  ConicProblem p;
  const auto tb = p.add_free(1);
  const auto yb = p.add_psd(2);
  const double m[2] = {2.0, -1.0};
  for (std::size_t i = 0; i < 2; ++i) {
    const auto r = p.add_row(-m[i]);
    p.add_matrix_entry(r, yb, i, i, 1.0);
    p.add_term(r, p.var(tb, 0), -1.0);
  }
  const auto r = p.add_row(0.0);
  p.add_matrix_entry(r, yb, 0, 1, 1.0);
  p.set_objective(p.var(tb, 0), 1.0);
  return p;
}

// min Tr X  s.t.  X psd, X00 = X11 = 1, X01 = off.
inline ConicProblem psd_fixed(double off) {
  ConicProblem p;
  const auto xb = p.add_psd(2);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto r = p.add_row(1.0);
    p.add_matrix_entry(r, xb, i, i, 1.0);
    p.add_objective_matrix_entry(xb, i, i, 1.0);
  }
  const auto r = p.add_row(off);
  p.add_matrix_entry(r, xb, 0, 1, 1.0);
  return p;
}

// min x1 + x2  s.t.  x1 + x2 = 1, x1 + x2 = 2, x >= 0.
inline ConicProblem lp_infeasible() {
  ConicProblem p;
  const auto nb = p.add_nonneg(2);
  for (double rhs : {1.0, 2.0}) {
    const auto r = p.add_row(rhs);
    p.add_term(r, p.var(nb, 0), 1.0);
    p.add_term(r, p.var(nb, 1), 1.0);
  }
  p.set_objective(p.var(nb, 0), 1.0);
  p.set_objective(p.var(nb, 1), 1.0);
  return p;
}

// min -x1  s.t.  x1 - x2 = 0, x >= 0.
inline ConicProblem lp_unbounded() {
  ConicProblem p;
  const auto nb = p.add_nonneg(2);
  const auto r = p.add_row(0.0);
  p.add_term(r, p.var(nb, 0), 1.0);
  p.add_term(r, p.var(nb, 1), -1.0);
  p.set_objective(p.var(nb, 0), -1.0);
  return p;
}

// 3x3 PSD with unit diagonal and X01 = X12 = 0.9, X02 = -0.9: infeasible
// because the implied correlation triangle is inconsistent.
inline ConicProblem psd_triangle_infeasible() {
  ConicProblem p;
  const auto xb = p.add_psd(3);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto r = p.add_row(1.0);
    p.add_matrix_entry(r, xb, i, i, 1.0);
  }
  const std::size_t ij[3][2] = {{0, 1}, {1, 2}, {0, 2}};
  const double v[3] = {0.9, 0.9, -0.9};
  for (int k = 0; k < 3; ++k) {
    const auto r = p.add_row(v[k]);
    p.add_matrix_entry(r, xb, ij[k][0], ij[k][1], 1.0);
  }
  return p;
}

// Hermitian 2x2: min Re X01 s.t. X Hermitian psd, unit diagonal; optimum -1.
inline ConicProblem hermitian_correlation() {
  ConicProblem p;
  const auto h = dtafopt::conic::add_hermitian_psd(p, 2);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto r = p.add_row(1.0);
    dtafopt::conic::add_hermitian_entry(p, h, r, dtafopt::conic::kNoRow, i, i, 1.0);
  }
  dtafopt::conic::add_hermitian_objective(p, h, 0, 1, dtafopt::cplx(1.0, 0.0));
  return p;
}

}  // namespace examples
