#pragma once

// Discrete-time ambiguity function
//   A(l, f) = sum_n x_n conj(x_{n-l}) exp(-j 2 pi f (n - l))
// and the band/grid sidelobe metrics built on it.

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <ostream>
#include <vector>

#include <json.hpp>

#include "dtafopt/errors.hpp"
#include "dtafopt/linalg.hpp"
#include "dtafopt/rational.hpp"
#include "dtafopt/trigpoly.hpp"

namespace dtafopt {

inline cplx dtaf(const ComplexSequence& x, long l, double f) {
  const long n = static_cast<long>(x.size());
  if (std::labs(l) > n - 1) throw DomainError("lag out of range");
  cplx acc = 0.0;
  for (long k = std::max(0L, l); k <= std::min(n - 1, n - 1 + l); ++k)
    acc += x[static_cast<std::size_t>(k)] * std::conj(x[static_cast<std::size_t>(k - l)]) *
           std::polar(1.0, -2.0 * kPi * f * static_cast<double>(k - l));
  return acc;
}

inline cplx daf(const ComplexSequence& x, long l, long k, long m) {
  if (m <= 0) throw DomainError("Doppler divisor must be positive");
  return dtaf(x, l, static_cast<double>(k) / static_cast<double>(m));
}

// Coefficients x_{m+l} conj(x_m), m = 0..N-1-l, whose polynomial equals A(l, .) for l >= 0.
inline CausalTrigPoly lag_polynomial(const ComplexSequence& x, std::size_t l) {
  if (l >= x.size()) throw DomainError("lag out of range");
  std::vector<cplx> h(x.size() - l);
  for (std::size_t m = 0; m < h.size(); ++m) h[m] = x[m + l] * std::conj(x[m]);
  return CausalTrigPoly(std::move(h));
}

struct DopplerGrid {
  long m = 0;  // bins are k/M
  long k = 0;  // |k| <= K
};

// Lags 1..L (mirrored to negative lags by symmetry) times the band
// [-f_R, f_R], optionally sampled on the grid {0, +-1/M, .., +-K/M}.
class SidelobeRegion {
 public:
  SidelobeRegion(std::size_t max_lag, Rational f_r, std::optional<DopplerGrid> grid = std::nullopt)
      : lag_(max_lag), f_r_(f_r), grid_(grid) {
    if (max_lag < 1) throw ConfigError("sidelobe region needs at least one lag");
    if (f_r.num < 0 || 2 * f_r.num >= f_r.den) throw ConfigError("band half-width must lie in [0, 1/2)");
    if (grid) {
      if (grid->m <= 0 || grid->k < 0) throw ConfigError("grid needs M > 0 and K >= 0");
      if (!(Rational(grid->k, grid->m) == f_r)) throw ConfigError("grid K/M must equal the band half-width");
    }
  }

  static SidelobeRegion gridded(std::size_t max_lag, long m, long k) {
    if (m <= 0) throw ConfigError("grid needs M > 0");
    return SidelobeRegion(max_lag, Rational(k, m), DopplerGrid{m, k});
  }

  std::size_t max_lag() const { return lag_; }
  Rational band() const { return f_r_; }
  double f_r() const { return f_r_.value(); }
  const std::optional<DopplerGrid>& grid() const { return grid_; }

 private:
  std::size_t lag_;
  Rational f_r_;
  std::optional<DopplerGrid> grid_;
};

inline double to_db20(double ratio) {
  return ratio > 0.0 ? 20.0 * std::log10(ratio) : -std::numeric_limits<double>::infinity();
}

struct PeakReport {
  double db = -std::numeric_limits<double>::infinity();
  long lag = 0;
  double f_d = 0.0;
  double magnitude = 0.0;
};

// Peak |A(l, f)| / N over lags 1..L and the continuous band.
inline PeakReport ntpsl(const ComplexSequence& x, const SidelobeRegion& region) {
  PeakReport best;
  const double n = static_cast<double>(x.size());
  for (std::size_t l = 1; l <= region.max_lag() && l < x.size(); ++l) {
    const CausalTrigPoly h = lag_polynomial(x, l);
    BandPeak pk = region.f_r() > 0.0 ? sup_modulus_on_band(h, region.f_r()) : BandPeak{0.0, h.modulus(0.0)};
    if (pk.value > best.magnitude || best.lag == 0) {
      best.magnitude = pk.value;
      best.lag = static_cast<long>(l);
      best.f_d = pk.f;
    }
  }
  best.db = to_db20(best.magnitude / n);
  return best;
}

inline PeakReport ngpsl(const ComplexSequence& x, const SidelobeRegion& region) {
  if (!region.grid()) throw ConfigError("grid metric requested without a Doppler grid");
  const auto g = *region.grid();
  PeakReport best;
  for (std::size_t l = 1; l <= region.max_lag() && l < x.size(); ++l)
    for (long k = -g.k; k <= g.k; ++k) {
      const double v = std::abs(daf(x, static_cast<long>(l), k, g.m));
      if (v > best.magnitude || best.lag == 0) {
        best.magnitude = v;
        best.lag = static_cast<long>(l);
        best.f_d = static_cast<double>(k) / static_cast<double>(g.m);
      }
    }
  best.db = to_db20(best.magnitude / static_cast<double>(x.size()));
  return best;
}

// Weighted mean of |A| / N over the grid (magnitude, not energy).
inline double nwisl(const ComplexSequence& x, const SidelobeRegion& region, const std::vector<double>& weights) {
  if (!region.grid()) throw ConfigError("grid metric requested without a Doppler grid");
  if (weights.size() != region.max_lag()) throw ConfigError("need one weight per lag");
  const auto g = *region.grid();
  const double n = static_cast<double>(x.size());
  double acc = 0.0;
  for (std::size_t l = 1; l <= region.max_lag() && l < x.size(); ++l)
    for (long k = -g.k; k <= g.k; ++k) acc += weights[l - 1] * std::abs(daf(x, static_cast<long>(l), k, g.m)) / n;
  acc /= static_cast<double>(region.max_lag()) * static_cast<double>(2 * g.k + 1);
  return to_db20(acc);
}

struct AfSample {
  long lag = 0;
  double f_d = 0.0;
  cplx value = 0.0;
};

// Lags lag_lo..lag_hi on an npts grid spanning [-1/2, 1/2].
inline std::vector<AfSample> af_surface(const ComplexSequence& x, long lag_lo, long lag_hi, std::size_t npts) {
  if (npts < 2) throw DomainError("surface needs at least two Doppler points");
  std::vector<AfSample> out;
  for (long l = lag_lo; l <= lag_hi; ++l)
    for (std::size_t i = 0; i < npts; ++i) {
      const double f = -0.5 + static_cast<double>(i) / static_cast<double>(npts - 1);
      out.push_back({l, f, dtaf(x, l, f)});
    }
  return out;
}

inline void write_af_csv(std::ostream& os, const std::vector<AfSample>& samples, std::size_t n) {
  os << "lag,f_D,re,im,mag_db\n";
  char buf[160];
  for (const auto& s : samples) {
    std::snprintf(buf, sizeof buf, "%ld,%.10g,%.10g,%.10g,%.6f\n", s.lag, s.f_d, s.value.real(), s.value.imag(),
                  to_db20(std::abs(s.value) / static_cast<double>(n)));
    os << buf;
  }
}

struct MetricsReport {
  PeakReport ntpsl;
  std::optional<PeakReport> ngpsl;
  std::optional<double> nwisl;
};

inline MetricsReport evaluate_metrics(const ComplexSequence& x, const SidelobeRegion& region) {
  MetricsReport r;
  r.ntpsl = ntpsl(x, region);
  if (region.grid()) {
    r.ngpsl = ngpsl(x, region);
    r.nwisl = nwisl(x, region, std::vector<double>(region.max_lag(), 1.0));
  }
  return r;
}

inline nlohmann::json db_json(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

inline nlohmann::json metrics_json(const MetricsReport& r) {
  nlohmann::json j;
  j["ntpsl_db"] = db_json(r.ntpsl.db);
  j["ngpsl_db"] = r.ngpsl ? db_json(r.ngpsl->db) : nlohmann::json(nullptr);
  j["nwisl_db"] = r.nwisl ? db_json(*r.nwisl) : nlohmann::json(nullptr);
  j["argmax"] = {{"lag", r.ntpsl.lag}, {"f_D", r.ntpsl.f_d}};
  return j;
}

}  // namespace dtafopt
