#pragma once

// Single-pulse matched-filter range-velocity simulation.
// Velocity sign: approaching targets have negative velocity, f_D = 2v/(lambda f_s).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "dtafopt/errors.hpp"
#include "dtafopt/linalg.hpp"

namespace dtafopt {

inline constexpr double kSpeedOfLight = 2.99792458e8;

struct Target {
  double range_m = 0.0;
  double vel_mps = 0.0;
  double power_db = 0.0;
};

struct RadarScene {
  double lambda_m = 0.02;
  double fs_hz = 1e6;
  std::vector<Target> targets;
  double noise_db = -45.0;
  double pfa = 1e-8;
  bool noiseless = false;
  std::uint64_t seed = 1;

  double range_bin_m() const { return kSpeedOfLight / (2.0 * fs_hz); }
  double velocity_resolution(std::size_t n) const { return lambda_m * fs_hz / (2.0 * static_cast<double>(n)); }
  double doppler(double v) const { return 2.0 * v / (lambda_m * fs_hz); }
  double noise_var() const { return std::pow(10.0, noise_db / 10.0); }

  // Integer delay in samples; anything further than 1e-6 bin from an integer is rejected.
  long delay_bin(const Target& t) const {
    const double d = 2.0 * t.range_m / (kSpeedOfLight / fs_hz);
    const double r = std::round(d);
    if (std::abs(d - r) > 1e-6) throw ConfigError("target at " + std::to_string(t.range_m) + " m is not on an integer range bin");
    if (r < 0) throw ConfigError("negative target range");
    return static_cast<long>(r);
  }
};

inline RadarScene scene_from_json(const nlohmann::json& j) {
  static const char* known[] = {"lambda_m", "fs_hz", "targets", "noise_db", "pfa", "noiseless", "seed"};
  try {
    for (auto it = j.begin(); it != j.end(); ++it)
      if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return it.key() == k; }) == std::end(known))
        throw ConfigError("unknown scene key '" + it.key() + "'");
    RadarScene s;
    s.lambda_m = j.at("lambda_m").get<double>();
    s.fs_hz = j.at("fs_hz").get<double>();
    for (const auto& t : j.at("targets")) s.targets.push_back({t.at("range_m"), t.at("vel_mps"), t.value("power_db", 0.0)});
    s.noise_db = j.value("noise_db", -45.0);
    s.pfa = j.value("pfa", 1e-8);
    s.noiseless = j.value("noiseless", false);
    s.seed = j.value("seed", std::uint64_t{1});
    if (!(s.lambda_m > 0.0) || !(s.fs_hz > 0.0)) throw ConfigError("wavelength and sample rate must be positive");
    if (!(s.pfa > 0.0 && s.pfa < 1.0)) throw ConfigError("P_FA must lie in (0, 1)");
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed scene: ") + e.what());
  }
}

// Noise is drawn with per-sample variance N sigma_w^2 so that after the
// N^2-normalised matched filter every noise-only cell is exponential with
// mean sigma_w^2, which is what the threshold formula assumes.
inline std::vector<cplx> synthesize_echo(const ComplexSequence& x, const RadarScene& scene, std::size_t window) {
  const std::size_t n = x.size();
  std::vector<cplx> r(window, cplx(0.0));
  for (const auto& t : scene.targets) {
    const long d = scene.delay_bin(t);
    if (static_cast<std::size_t>(d) + n > window) throw ConfigError("target outside the receive window");
    const double a = std::pow(10.0, t.power_db / 20.0);
    const double fd = scene.doppler(t.vel_mps);
    for (std::size_t m = 0; m < n; ++m)
      r[static_cast<std::size_t>(d) + m] += a * x[m] * std::polar(1.0, 2.0 * kPi * fd * static_cast<double>(m));
  }
  if (!scene.noiseless) {
    std::mt19937_64 gen(scene.seed);
    std::normal_distribution<double> g(0.0, std::sqrt(scene.noise_var() * static_cast<double>(n) / 2.0));
    for (auto& v : r) v += cplx(g(gen), g(gen));
  }
  return r;
}

inline double detection_threshold(double pfa, double noise_var) { return -std::log(pfa) * noise_var; }

struct VelocityGrid {
  double v_min = 0.0;
  double v_max = 0.0;
  std::size_t count = 1;

  double at(std::size_t i) const {
    return count == 1 ? v_min : v_min + (v_max - v_min) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
};

struct MapCell {
  long range_bin = 0;
  double vel_mps = 0.0;
  double power = 0.0;
  bool detected = false;
  bool false_alarm = false;
};

struct RangeVelocityMap {
  std::size_t range_bins = 0;
  VelocityGrid velocities;
  std::vector<double> power;  // linear, row-major [range][velocity]
  double threshold = 0.0;     // linear

  double at(std::size_t d, std::size_t v) const { return power[d * velocities.count + v]; }
  double threshold_db() const { return 10.0 * std::log10(threshold); }
};

inline double bank_output(const std::vector<cplx>& r, const ComplexSequence& x, std::size_t d, double fv) {
  const std::size_t n = x.size();
  cplx acc = 0.0;
  for (std::size_t k = 0; k < n; ++k)
    acc += r[k + d] * std::conj(x[k]) * std::polar(1.0, -2.0 * kPi * fv * static_cast<double>(k));
  return std::norm(acc) / (static_cast<double>(n) * static_cast<double>(n));
}

inline RangeVelocityMap range_velocity_map(const std::vector<cplx>& r, const ComplexSequence& x, const RadarScene& scene,
                                           const VelocityGrid& grid) {
  if (r.size() < x.size()) throw ConfigError("receive window shorter than the pulse");
  RangeVelocityMap map;
  map.range_bins = r.size() - x.size() + 1;
  map.velocities = grid;
  map.threshold = detection_threshold(scene.pfa, scene.noise_var());
  map.power.resize(map.range_bins * grid.count);
  for (std::size_t d = 0; d < map.range_bins; ++d)
    for (std::size_t v = 0; v < grid.count; ++v)
      map.power[d * grid.count + v] = bank_output(r, x, d, scene.doppler(grid.at(v)));
  return map;
}

// Optional restriction of false-alarm counting to lags 1..L around each
// target and Doppler offsets within +-f_R of it.
struct ScoringRegion {
  long max_lag = 0;
  double f_r = 0.0;
};

struct FalseAlarmReport {
  std::size_t detections = 0;
  std::size_t false_alarms = 0;
  std::size_t false_alarms_in_region = 0;
  std::vector<MapCell> cells;  // every detection
  double threshold_db = 0.0;
};

// A detection is attributed to a target when it sits on the target's range
// bin: the zero-delay Doppler cut is the same for every unimodular pulse.
inline FalseAlarmReport false_alarm_report(const RangeVelocityMap& map, const RadarScene& scene, std::optional<ScoringRegion> region = std::nullopt) {
  FalseAlarmReport rep;
  rep.threshold_db = map.threshold_db();
  std::vector<long> bins;
  for (const auto& t : scene.targets) bins.push_back(scene.delay_bin(t));
  for (std::size_t d = 0; d < map.range_bins; ++d)
    for (std::size_t v = 0; v < map.velocities.count; ++v) {
      const double p = map.at(d, v);
      if (!(p > map.threshold)) continue;
      MapCell c{static_cast<long>(d), map.velocities.at(v), p, true, false};
      c.false_alarm = std::none_of(bins.begin(), bins.end(), [&](long b) { return b == c.range_bin; });
      ++rep.detections;
      if (c.false_alarm) {
        ++rep.false_alarms;
        if (region) {
          for (std::size_t i = 0; i < bins.size(); ++i) {
            const long lag = c.range_bin - bins[i];
            const double df = scene.doppler(c.vel_mps) - scene.doppler(scene.targets[i].vel_mps);
            if (lag != 0 && std::labs(lag) <= region->max_lag && std::abs(df) <= region->f_r + 1e-12) {
              ++rep.false_alarms_in_region;
              break;
            }
          }
        }
      }
      rep.cells.push_back(c);
    }
  return rep;
}

inline void write_map_csv(std::ostream& os, const RangeVelocityMap& map, const RadarScene& scene) {
  os << "range_m,vel_mps,power_db,detected,false_alarm\n";
  std::vector<char> on_target(map.range_bins, 0);
  for (const auto& t : scene.targets) {
    const auto b = static_cast<std::size_t>(scene.delay_bin(t));
    if (b < map.range_bins) on_target[b] = 1;
  }
  char buf[160];
  for (std::size_t d = 0; d < map.range_bins; ++d)
    for (std::size_t v = 0; v < map.velocities.count; ++v) {
      const double p = map.at(d, v);
      const bool det = p > map.threshold;
      std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.4f,%d,%d\n", static_cast<double>(d) * scene.range_bin_m(), map.velocities.at(v),
                    p > 0.0 ? 10.0 * std::log10(p) : -400.0, det ? 1 : 0, det && !on_target[d] ? 1 : 0);
      os << buf;
    }
}

inline nlohmann::json report_json(const FalseAlarmReport& rep, const RadarScene& scene, std::size_t n) {
  nlohmann::json j;
  j["velocity_convention"] = "approaching targets have negative velocity";
  j["threshold_db"] = rep.threshold_db;
  j["velocity_resolution_mps"] = scene.velocity_resolution(n);
  j["range_resolution_m"] = scene.range_bin_m();
  j["detections"] = rep.detections;
  j["false_alarms"] = rep.false_alarms;
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : rep.cells)
    cells.push_back({{"range_m", static_cast<double>(c.range_bin) * scene.range_bin_m()},
                     {"vel_mps", c.vel_mps},
                     {"power_db", 10.0 * std::log10(c.power)},
                     {"false_alarm", c.false_alarm}});
  j["cells"] = cells;
  return j;
}

}  // namespace dtafopt
