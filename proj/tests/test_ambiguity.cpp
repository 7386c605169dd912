#include <gtest/gtest.h>

#include <random>

#include "dtafopt/ambiguity.hpp"

using namespace dtafopt;

namespace {

ComplexSequence random_unimodular(std::size_t n, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
  std::vector<cplx> v(n);
  for (auto& e : v) e = std::polar(1.0, u(gen));
  return ComplexSequence::unimodular(v);
}

const ComplexSequence ones4({cplx(1), cplx(1), cplx(1), cplx(1)});

}  // namespace

TEST(Dtaf, Examples) {
  const ComplexSequence x({cplx(1), cplx(1)});
  EXPECT_EQ(dtaf(x, 0, 0.0), cplx(2));
  for (double f : {-0.3, 0.0, 0.17}) EXPECT_NEAR(std::abs(dtaf(x, 1, f) - cplx(1)), 0.0, 1e-15);
  const ComplexSequence y({cplx(1), cplx(0, 1), cplx(-1)});
  EXPECT_NEAR(std::abs(dtaf(y, 1, 0.0) - cplx(0, 2)), 0.0, 1e-15);
  EXPECT_THROW(dtaf(x, 2, 0.0), DomainError);
}

TEST(Daf, Examples) {
  const ComplexSequence x({cplx(1), cplx(1)});
  EXPECT_NEAR(std::abs(daf(x, 1, 1, 4) - cplx(1)), 0.0, 1e-15);
  std::mt19937_64 gen(8);
  const auto z = random_unimodular(13, gen);
  for (long l = -12; l <= 12; l += 3) {
    EXPECT_EQ(daf(z, l, 0, 7), dtaf(z, l, 0.0));
    for (long k = -3; k <= 3; ++k) EXPECT_NEAR(std::abs(daf(z, l, k, 7) - dtaf(z, l, k / 7.0)), 0.0, 1e-12);
  }
}

TEST(LagPolynomial, MatchesDtaf) {
  std::mt19937_64 gen(2);
  const auto x = random_unimodular(9, gen);
  for (std::size_t l = 0; l < 9; ++l) {
    const auto h = lag_polynomial(x, l);
    for (double f : {-0.4, -0.05, 0.0, 0.2}) EXPECT_NEAR(std::abs(h.evaluate(f) - dtaf(x, static_cast<long>(l), f)), 0.0, 1e-12);
  }
}

TEST(Metrics, AllOnesPointRegion) {
  const SidelobeRegion point(1, Rational(0, 1));
  EXPECT_NEAR(ntpsl(ones4, point).db, -2.4988, 1e-4);
  const auto g = SidelobeRegion::gridded(1, 4, 0);
  EXPECT_NEAR(ngpsl(ones4, g).db, -2.4988, 1e-4);
  EXPECT_NEAR(nwisl(ones4, g, {1.0}), -2.4988, 1e-4);
  EXPECT_NEAR(20.0 * std::log10(0.75), -2.4988, 1e-4);
}

TEST(Metrics, ZeroWeights) {
  EXPECT_TRUE(std::isinf(nwisl(ones4, SidelobeRegion::gridded(1, 4, 0), {0.0})));
}

TEST(Metrics, GridBelowBand) {
  std::mt19937_64 gen(31);
  for (int rep = 0; rep < 20; ++rep) {
    const auto x = random_unimodular(16 + rep % 8, gen);
    const auto region = SidelobeRegion::gridded(3, 32, 3);
    EXPECT_LE(ngpsl(x, region).db, ntpsl(x, region).db + 1e-9);
  }
}

TEST(Region, Validation) {
  EXPECT_THROW(SidelobeRegion(0, Rational(3, 32)), ConfigError);
  EXPECT_THROW(SidelobeRegion(3, Rational(1, 2)), ConfigError);
  EXPECT_THROW(SidelobeRegion(3, Rational(3, 32), DopplerGrid{32, 2}), ConfigError);
  EXPECT_NO_THROW(SidelobeRegion(3, Rational(3, 32), DopplerGrid{64, 6}));
  EXPECT_THROW(ngpsl(ones4, SidelobeRegion(1, Rational(1, 8))), ConfigError);
}

TEST(Rational, Parse) {
  EXPECT_EQ(Rational::parse("3/32"), Rational(3, 32));
  EXPECT_EQ(Rational::parse("6/64"), Rational(3, 32));
  EXPECT_EQ(Rational::parse("0.09375"), Rational(3, 32));
  EXPECT_EQ(Rational::parse("0"), Rational(0, 1));
  EXPECT_THROW(Rational::parse("abc"), ConfigError);
  EXPECT_THROW(Rational::parse("1/0"), ConfigError);
}

TEST(Surface, CsvHeader) {
  std::ostringstream os;
  write_af_csv(os, af_surface(ones4, 0, 1, 5), 4);
  const std::string s = os.str();
  EXPECT_EQ(s.substr(0, s.find('\n')), "lag,f_D,re,im,mag_db");
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 11);
}

TEST(Json, NullForInfinite) {
  MetricsReport r;
  r.ntpsl.db = -std::numeric_limits<double>::infinity();
  const auto j = metrics_json(r);
  EXPECT_TRUE(j["ntpsl_db"].is_null());
  EXPECT_TRUE(j["ngpsl_db"].is_null());
}
