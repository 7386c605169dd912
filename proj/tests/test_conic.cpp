#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "dtafopt/conic/solver.hpp"
#include "solver_examples.hpp"

using namespace dtafopt;
using namespace dtafopt::conic;

namespace {

void expect_kkt(const ConicProblem& p, const SolveOutcome& o) {
  const auto k = kkt_check(p, o);
  EXPECT_TRUE(k.ok(1e-6)) << "primal " << k.primal << " dual " << k.dual << " gap " << k.gap << " cone " << k.cone;
}

}  // namespace

TEST(Solver, LpCorner) {
  const auto p = examples::lp_corner();
  const auto o = solve(p);
  ASSERT_EQ(o.status, SolveStatus::Optimal);
  EXPECT_NEAR(o.x[0], 3.0, 1e-6);
  EXPECT_NEAR(o.primal_objective, 3.0, 1e-6);
  expect_kkt(p, o);
}

TEST(Solver, LambdaMaxEpigraph) {
  const auto p = examples::lambda_max_epigraph();
  const auto o = solve(p);
  ASSERT_EQ(o.status, SolveStatus::Optimal);
  EXPECT_NEAR(o.x[0], 2.0, 1e-6);
  expect_kkt(p, o);
}

TEST(Solver, PsdFlip) {
  const auto feas = examples::psd_fixed(0.9);
  const auto o = solve(feas);
  ASSERT_EQ(o.status, SolveStatus::Optimal);
  EXPECT_NEAR(o.primal_objective, 2.0, 1e-6);
  expect_kkt(feas, o);

  const auto infeas = examples::psd_fixed(1.1);
  const auto oi = solve(infeas);
  ASSERT_EQ(oi.status, SolveStatus::PrimalInfeasible);
  EXPECT_TRUE(check_infeasibility_certificate(infeas, oi.y).valid);
}

TEST(Solver, LpInfeasible) {
  const auto p = examples::lp_infeasible();
  const auto o = solve(p);
  ASSERT_EQ(o.status, SolveStatus::PrimalInfeasible);
  EXPECT_TRUE(check_infeasibility_certificate(p, o.y).valid);
}

TEST(Solver, TriangleInfeasible) {
  const auto p = examples::psd_triangle_infeasible();
  const auto o = solve(p);
  ASSERT_EQ(o.status, SolveStatus::PrimalInfeasible);
  EXPECT_TRUE(check_infeasibility_certificate(p, o.y).valid);
}

TEST(Solver, Unbounded) { EXPECT_EQ(solve(examples::lp_unbounded()).status, SolveStatus::DualInfeasible); }

TEST(Solver, HermitianBlock) {
  const auto p = examples::hermitian_correlation();
  const auto o = solve(p);
  ASSERT_EQ(o.status, SolveStatus::Optimal);
  EXPECT_NEAR(o.primal_objective, -1.0, 1e-6);
  const auto x = hermitian_value(p, o.x, HermitianBlock{0, 2});
  EXPECT_NEAR(x(0, 1).real(), -1.0, 1e-5);
  expect_kkt(p, o);
}

TEST(Solver, RandomFeasibleSdps) {
  std::mt19937_64 gen(17);
  std::normal_distribution<double> g;
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t d = 3 + rep % 4;
    Eigen::MatrixXd b = Eigen::MatrixXd::NullaryExpr(d, d, [&] { return g(gen); });
    const Eigen::MatrixXd x0 = b * b.transpose() + Eigen::MatrixXd::Identity(d, d);
    Eigen::MatrixXd c = Eigen::MatrixXd::NullaryExpr(d, d, [&] { return g(gen); });
    c = c * c.transpose();
    ConicProblem p;
    const auto xb = p.add_psd(d);
    for (int r = 0; r < 4; ++r) {
      Eigen::MatrixXd a = Eigen::MatrixXd::NullaryExpr(d, d, [&] { return g(gen); });
      a = 0.5 * (a + a.transpose());
      const auto row = p.add_row((a.cwiseProduct(x0)).sum());
      for (std::size_t j = 0; j < d; ++j)
        for (std::size_t i = 0; i <= j; ++i) p.add_matrix_entry(row, xb, i, j, i == j ? a(i, j) : 2.0 * a(i, j));
    }
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t i = 0; i <= j; ++i) p.add_objective_matrix_entry(xb, i, j, i == j ? c(i, j) : 2.0 * c(i, j));
    const auto o = solve(p);
    ASSERT_EQ(o.status, SolveStatus::Optimal);
    expect_kkt(p, o);
  }
}

TEST(Problem, RejectsNaN) {
  auto p = examples::lp_corner();
  p.set_rhs(0, std::nan(""));
  EXPECT_THROW(assemble_check(p), MalformedProblem);
}

TEST(Problem, RedundantRowReduced) {
  auto p = examples::lp_corner();
  const auto r = p.add_row(3.0);
  p.add_term(r, 0, 1.0);
  p.add_term(r, 1, -1.0);
  const auto red = reduce_rows(p);
  EXPECT_EQ(red.kept.size(), 1u);
  EXPECT_EQ(red.redundant.size(), 1u);
  const auto d = assemble_check(p);
  EXPECT_EQ(d.redundant_rows.size(), 1u);
  const auto o = solve(p);
  ASSERT_EQ(o.status, SolveStatus::Optimal);
  EXPECT_NEAR(o.x[0], 3.0, 1e-6);
}

TEST(Problem, IdentityLp) {
  ConicProblem p;
  const auto nb = p.add_nonneg(3);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto r = p.add_row(1.0 + i);
    p.add_term(r, p.var(nb, i), 1.0);
    p.set_objective(p.var(nb, i), 1.0);
  }
  EXPECT_NO_THROW(assemble_check(p));
  const auto o = solve(p);
  ASSERT_EQ(o.status, SolveStatus::Optimal);
  EXPECT_NEAR(o.primal_objective, 6.0, 1e-6);
}

TEST(Problem, DumpLoadRoundTrip) {
  const auto p = examples::lambda_max_epigraph();
  std::stringstream ss;
  dump(p, ss);
  const auto q = load(ss);
  ASSERT_EQ(q.num_rows(), p.num_rows());
  ASSERT_EQ(q.num_vars(), p.num_vars());
  EXPECT_EQ(q.objective(), p.objective());
  EXPECT_EQ(q.rhs(), p.rhs());
  EXPECT_NEAR(solve(q).primal_objective, 2.0, 1e-6);
}
