#include <gtest/gtest.h>

#include <random>

#include "dtafopt/trigpoly.hpp"

using namespace dtafopt;

TEST(SegmentWeights, QuarterBand) {
  const auto w = segment_weights(0.25);
  EXPECT_NEAR(w.d0, 0.0, 1e-15);
  EXPECT_NEAR(w.d1.real(), 0.5, 1e-15);
  EXPECT_EQ(w.d1.imag(), 0.0);
}

TEST(SegmentWeights, EighthBand) {
  const auto w = segment_weights(0.125);
  EXPECT_NEAR(w.d0, -0.4142136, 1e-7);
  EXPECT_NEAR(w.d1.real(), 0.2928932, 1e-7);
}

TEST(SegmentWeights, SignPattern) {
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> u(0.005, 0.495);
  for (int rep = 0; rep < 20; ++rep) {
    const double fr = u(gen);
    const auto w = segment_weights(fr);
    EXPECT_NEAR(w.indicator(fr), 0.0, 1e-12);
    EXPECT_NEAR(w.indicator(-fr), 0.0, 1e-12);
    for (int i = 0; i < 4096; ++i) {
      const double f = -0.5 + static_cast<double>(i) / 4095.0;
      if (std::abs(std::abs(f) - fr) < 1e-9) continue;
      if (std::abs(f) < fr)
        EXPECT_GE(w.indicator(f), 0.0);
      else
        EXPECT_LT(w.indicator(f), 0.0);
    }
  }
}

TEST(SegmentWeights, Domain) {
  EXPECT_THROW(segment_weights(0.0), DomainError);
  EXPECT_THROW(segment_weights(0.5), DomainError);
  EXPECT_THROW(segment_weights(-0.1), DomainError);
}

TEST(TrigPoly, ShiftKeepsModulus) {
  const CausalTrigPoly h({cplx(1, 2), cplx(-0.5, 0.3), cplx(0.1, -1)});
  const auto s = h.shifted(3);
  for (double f : {-0.4, -0.1, 0.0, 0.07, 0.33}) EXPECT_NEAR(h.modulus(f), s.modulus(f), 1e-14);
  EXPECT_NEAR(std::abs(s.evaluate(0.2) - h.evaluate(0.2) * std::polar(1.0, -2.0 * kPi * 0.2 * 3)), 0.0, 1e-14);
}

TEST(LmiTemplates, SmallCases) {
  const auto w = segment_weights(0.25);
  const auto t1 = build_segment_lmi(1, w);
  ASSERT_EQ(t1.size(), 2u);
  EXPECT_NEAR(std::abs(t1[0].phi.dense()(0, 0) - cplx(w.d0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(t1[1].phi.dense()(0, 0) - w.d1), 0.0, 1e-15);
  for (const auto& t : build_segment_lmi(5, w)) {
    if (t.n == 0) {
      EXPECT_TRUE(t.theta.dense().isIdentity());
    }
  }
  const auto t2 = build_segment_lmi(2, w);
  const RMatrix th = t2[2].theta.dense();
  EXPECT_EQ(th(0, 2), 1.0);
  EXPECT_EQ(th.sum(), 1.0);
}

TEST(BandSup, Examples) {
  const CausalTrigPoly one({cplx(1)});
  EXPECT_NEAR(sup_modulus_on_band(one, 0.1).value, 1.0, 1e-15);
  const CausalTrigPoly two({cplx(1), cplx(1)});
  auto pk = sup_modulus_on_band(two, 0.5);
  EXPECT_NEAR(pk.value, 2.0, 1e-12);
  EXPECT_NEAR(pk.f, 0.0, 1e-6);
  EXPECT_NEAR(two.modulus(0.25), std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(sup_modulus_on_band(two, 0.25).value, 2.0, 1e-12);
}

TEST(BandSup, MatchesDenseScan) {
  std::mt19937_64 gen(4);
  std::normal_distribution<double> g;
  for (int rep = 0; rep < 30; ++rep) {
    std::vector<cplx> c(1 + rep % 9);
    for (auto& v : c) v = cplx(g(gen), g(gen));
    const CausalTrigPoly h(c);
    const double fr = 0.05 + 0.4 * static_cast<double>(rep) / 30.0;
    double dense = 0.0;
    for (int i = 0; i <= 200000; ++i) dense = std::max(dense, h.modulus(-fr + 2.0 * fr * i / 200000.0));
    const double sup = sup_modulus_on_band(h, fr).value;
    EXPECT_GE(sup, dense - 1e-12);
    EXPECT_LE(sup, dense * (1.0 + 1e-7));
  }
}

TEST(Certify, FlatPolynomial) {
  const CausalTrigPoly one({cplx(1)});
  for (double fr : {1.0 / 16, 0.25}) {
    EXPECT_EQ(certify_bound(one, 1.0 + 1e-6, fr).status, CertifyStatus::Feasible);
    EXPECT_EQ(certify_bound(one, 1.0 - 1e-3, fr).status, CertifyStatus::Infeasible);
  }
}

TEST(Certify, ZeroBound) {
  EXPECT_EQ(certify_bound(CausalTrigPoly({cplx(0), cplx(0)}), 0.0, 0.1).status, CertifyStatus::Feasible);
  EXPECT_EQ(certify_bound(CausalTrigPoly({cplx(0), cplx(1e-3)}), 0.0, 0.1).status, CertifyStatus::Infeasible);
}

TEST(Certify, RandomAgainstOracleWithWitness) {
  std::mt19937_64 gen(99);
  std::normal_distribution<double> g;
  const double bands[] = {1.0 / 16, 1.0 / 8, 1.0 / 4};
  for (int rep = 0; rep < 12; ++rep) {
    std::vector<cplx> c(1 + rep % 6);
    for (auto& v : c) v = cplx(g(gen), g(gen));
    const CausalTrigPoly h(c);
    const double fr = bands[rep % 3];
    const double sup = sup_modulus_on_band(h, fr).value;
    const auto hi = certify_bound(h, sup * (1 + 1e-4), fr);
    ASSERT_EQ(hi.status, CertifyStatus::Feasible);
    const auto r = certificate_residual(*hi.certificate, segment_weights(fr));
    EXPECT_LE(r.equality, 1e-6 * (1.0 + sup * sup));
    EXPECT_LE(r.psd, 1e-6);
    EXPECT_EQ(certify_bound(h, sup * (1 - 1e-4), fr).status, CertifyStatus::Infeasible);
  }
}
