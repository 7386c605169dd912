#include <gtest/gtest.h>

#include <random>

#include "dtafopt/linalg.hpp"

using namespace dtafopt;

namespace {

HermitianMatrix random_hermitian(std::size_t n, std::mt19937_64& gen) {
  std::normal_distribution<double> g;
  CMatrix a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = cplx(g(gen), g(gen));
  return HermitianMatrix::from_upper(a + a.adjoint());
}

}  // namespace

TEST(Sequence, UnimodularFlag) {
  EXPECT_NO_THROW(ComplexSequence::unimodular({cplx(1, 0), std::polar(1.0, 0.3)}));
  EXPECT_THROW(ComplexSequence::unimodular({cplx(1.1, 0)}), DomainError);
  EXPECT_THROW(ComplexSequence(std::vector<cplx>{}), DimensionError);
  const ComplexSequence s({cplx(2, 0), cplx(0, -0.5)});
  EXPECT_DOUBLE_EQ(s.modulus_deviation(), 1.0);
  EXPECT_TRUE(s.projected_unimodular().check_unimodular(1e-15));
}

TEST(Hermitian, RejectsAsymmetric) {
  CMatrix a(2, 2);
  a << 1, cplx(0, 1), cplx(0, 1), 1;
  EXPECT_THROW(HermitianMatrix{a}, InvalidMatrix);
  a(1, 0) = cplx(0, -1);
  EXPECT_NO_THROW(HermitianMatrix{a});
}

TEST(Eig, Identity) {
  const auto ed = eig_hermitian(HermitianMatrix::identity(3));
  for (double v : ed.values) EXPECT_DOUBLE_EQ(v, 1.0);
  EXPECT_LT((ed.vectors.adjoint() * ed.vectors - CMatrix::Identity(3, 3)).norm(), 1e-14);
}

TEST(Eig, Diagonal) {
  const std::vector<double> d{2.0, -1.0};
  const auto ed = eig_hermitian(HermitianMatrix::diagonal(d));
  EXPECT_DOUBLE_EQ(ed.values[0], 2.0);
  EXPECT_DOUBLE_EQ(ed.values[1], -1.0);
  EXPECT_NEAR(std::abs(ed.vectors(0, 0)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(ed.vectors(1, 1)), 1.0, 1e-15);
}

TEST(Eig, Swap) {
  CMatrix a(2, 2);
  a << 0, 1, 1, 0;
  const auto ed = eig_hermitian(HermitianMatrix(a));
  EXPECT_NEAR(ed.values[0], 1.0, 1e-14);
  EXPECT_NEAR(ed.values[1], -1.0, 1e-14);
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(ed.vectors(0, 0)), r, 1e-14);
  EXPECT_NEAR(std::abs(ed.vectors(1, 0)), r, 1e-14);
  EXPECT_NEAR(std::abs(ed.vectors(0, 0) - ed.vectors(1, 0)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(ed.vectors(0, 1) + ed.vectors(1, 1)), 0.0, 1e-14);
}

TEST(Eig, RandomReconstruction) {
  std::mt19937_64 gen(7);
  for (std::size_t n : {1, 2, 5, 17, 40}) {
    const auto h = random_hermitian(n, gen);
    const auto ed = eig_hermitian(h);
    RMatrix lam = RMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) lam(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = ed.values[i];
    const CMatrix rec = ed.vectors * lam.cast<cplx>() * ed.vectors.adjoint();
    EXPECT_LT((rec - h.dense()).norm(), 1e-11 * (1.0 + h.frobenius_norm()));
    for (std::size_t i = 1; i < n; ++i) EXPECT_GE(ed.values[i - 1], ed.values[i]);
  }
}

TEST(TraceInner, Examples) {
  CMatrix b(2, 2);
  b << 3, cplx(0, 1), cplx(0, -1), 4;
  EXPECT_EQ(trace_inner(HermitianMatrix::identity(2), HermitianMatrix(b)), cplx(7, 0));

  CMatrix c(2, 2);
  c << 1.5, cplx(2, 3), cplx(2, -3), -1;
  EXPECT_EQ(trace_inner(ElementaryToeplitz{2, 1}, HermitianMatrix(c)), cplx(2, -3));

  std::mt19937_64 gen(3);
  EXPECT_EQ(trace_inner(ElementaryToeplitz{3, 3}, random_hermitian(3, gen)), cplx(0, 0));
}

TEST(Toeplitz, Definition) {
  EXPECT_TRUE(ElementaryToeplitz({4, 0}).dense().isIdentity());
  const RMatrix t = ElementaryToeplitz{3, -1}.dense();
  EXPECT_EQ(t(1, 0), 1.0);
  EXPECT_EQ(t(2, 1), 1.0);
  EXPECT_EQ(t.sum(), 2.0);
  EXPECT_EQ(ElementaryToeplitz({3, 2}).dense().sum(), 1.0);
  EXPECT_EQ(ElementaryToeplitz({3, 2}).dense()(0, 2), 1.0);
  EXPECT_EQ(ElementaryToeplitz({3, -3}).dense().sum(), 0.0);
}

TEST(Embed, Examples) {
  CMatrix one(1, 1);
  one << 1;
  EXPECT_TRUE(real_embed(HermitianMatrix(one)).isIdentity());

  CMatrix a(2, 2);
  a << 0, cplx(0, 1), cplx(0, -1), 0;
  RMatrix expect(4, 4);
  expect << 0, 0, 0, -1, 0, 0, 1, 0, 0, 1, 0, 0, -1, 0, 0, 0;
  EXPECT_EQ(real_embed(HermitianMatrix(a)), expect);
}

TEST(Embed, RoundTripAndPsd) {
  std::mt19937_64 gen(11);
  for (int rep = 0; rep < 10; ++rep) {
    const auto h = random_hermitian(6, gen);
    EXPECT_LT((real_unembed(real_embed(h)).dense() - h.dense()).norm(), 1e-14);
    const auto psd = HermitianMatrix::from_upper(h.dense() * h.dense() + 1e-3 * CMatrix::Identity(6, 6));
    const auto e = real_embed(psd);
    EXPECT_TRUE(std::holds_alternative<CMatrix>(cholesky_psd(HermitianMatrix::from_upper(e.cast<cplx>()))));
  }
}

TEST(Cholesky, Examples) {
  auto l = std::get<CMatrix>(cholesky_psd(HermitianMatrix::identity(2)));
  EXPECT_TRUE(l.isIdentity());

  CMatrix a(2, 2);
  a << 4, 2, 2, 2;
  l = std::get<CMatrix>(cholesky_psd(HermitianMatrix(a)));
  CMatrix expect(2, 2);
  expect << 2, 0, 1, 1;
  EXPECT_LT((l - expect).norm(), 1e-15);

  CMatrix b(2, 2);
  b << 0, 0, 0, -1;
  EXPECT_TRUE(std::holds_alternative<NotPsd>(cholesky_psd(HermitianMatrix(b))));
}

TEST(Psd, Flags) {
  std::mt19937_64 gen(5);
  const auto h = random_hermitian(5, gen);
  EXPECT_TRUE(is_psd(HermitianMatrix::from_upper(h.dense() * h.dense())));
  EXPECT_FALSE(is_psd(HermitianMatrix::from_upper(-h.dense() * h.dense())));
}
