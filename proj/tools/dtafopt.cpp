#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "dtafopt/dtafopt.hpp"

using namespace dtafopt;
namespace fs = std::filesystem;

namespace {

struct DesignArgs {
  std::size_t n = 32;
  std::size_t l = 3;
  std::string fr = "3/32";
  double zeta = 10.0;
  double kappa = 0.99;
  double eps = 1e-3;
  std::string mode = "trimmed";
  std::string style = "band";
  long m = 0;
  long k = 0;
  std::uint64_t seed = 1;
  std::size_t cap = 2000;
  std::string out = ".";
  bool dump_sdp = false;
  bool verbose = false;
};

struct EvalArgs {
  std::string waveform;
  std::size_t l = 3;
  std::string fr = "3/32";
  long m = 0;
  long k = 0;
  std::string out = ".";
};

struct CertifyArgs {
  std::string waveform;
  std::size_t lag = 1;
  double gamma_db = 0.0;
  std::string fr = "3/32";
};

struct DetectArgs {
  std::string scene;
  std::string waveform;
  std::string out = ".";
  std::size_t window = 0;
  double vmin = NAN;
  double vmax = NAN;
  std::size_t vcount = 0;
};

// The one place where band fractions become doubles is Rational::value().
DesignSpec spec_from(const DesignArgs& a) {
  DesignSpec s;
  s.n = a.n;
  s.l = a.l;
  s.f_r = Rational::parse(a.fr);
  s.zeta = a.zeta;
  s.kappa = a.kappa;
  s.eps = a.eps;
  s.mode = a.mode == "paperfull" ? LiftMode::PaperFull : LiftMode::Trimmed;
  s.style = a.style == "grid" ? ConstraintStyle::GridOnly : ConstraintStyle::ContinuousBand;
  s.grid_m = a.m;
  s.grid_k = a.k;
  s.seed = a.seed;
  s.iteration_cap = a.cap;
  s.validate();
  return s;
}

SidelobeRegion region_from(std::size_t l, const std::string& fr, long m, long k) {
  const Rational r = Rational::parse(fr);
  if (m > 0) return SidelobeRegion(l, r, DopplerGrid{m, k});
  return SidelobeRegion(l, r);
}

nlohmann::json full_metrics_json(const MetricsReport& r) {
  auto j = metrics_json(r);
  if (r.ngpsl) j["ngpsl_le_ntpsl"] = r.ngpsl->db <= r.ntpsl.db + 1e-12;
  return j;
}

int cmd_design(const DesignArgs& a) {
  const DesignSpec spec = spec_from(a);
  fs::create_directories(a.out);
  RunHooks hooks;
  hooks.solver.verbose = false;
  if (a.dump_sdp)
    hooks.on_problem = [&](std::size_t iter, const IterationSdp& sdp) {
      char name[64];
      std::snprintf(name, sizeof name, "sdp_%04zu.txt", iter);
      std::ofstream os(fs::path(a.out) / name);
      conic::dump(sdp.problem, os);
    };
  if (a.verbose)
    hooks.on_iteration = [&](const TraceRow& r) {
      std::fprintf(stderr, "iter %4zu %s w=%.6f t=%.6g lambda/N=%.6f\n", r.iter,
                   r.feasible ? "ok  " : (r.stalled ? "stall" : "infs"), r.w, r.t, r.lambda_max_ratio);
    };
  const DesignResult res =
      spec.style == ConstraintStyle::GridOnly ? design_grid_baseline(spec, hooks) : srocr_run(spec, hooks);
  write_text((fs::path(a.out) / "waveform.json").string(), waveform_json(res.x_opt, spec.describe(), res.metrics.ntpsl.db));
  auto mj = full_metrics_json(res.metrics);
  mj["iterations"] = res.iterations;
  mj["hit_iteration_cap"] = res.hit_iteration_cap;
  mj["modulus_deviation"] = res.modulus_deviation;
  mj["t_final_db"] = to_db20(std::sqrt(std::max(res.t_final, 0.0)) / static_cast<double>(spec.n));
  mj["seconds"] = res.seconds;
  mj["spec"] = spec.describe();
  write_text((fs::path(a.out) / "metrics.json").string(), mj.dump(2) + "\n");
  std::ofstream tr(fs::path(a.out) / "trace.csv");
  write_trace_csv(tr, res.trace, spec.n);
  std::printf("NTPSL %.4f dB after %zu iterations (%.1f s)\n", res.metrics.ntpsl.db, res.iterations, res.seconds);
  return 0;
}

int cmd_eval(const EvalArgs& a) {
  const auto wf = load_waveform(a.waveform);
  const SidelobeRegion region = region_from(a.l, a.fr, a.m, a.k);
  const auto rep = evaluate_metrics(wf.x, region);
  fs::create_directories(a.out);
  write_text((fs::path(a.out) / "metrics.json").string(), full_metrics_json(rep).dump(2) + "\n");
  std::ofstream cuts(fs::path(a.out) / "cuts.csv");
  const long lmax = static_cast<long>(std::min(a.l, wf.x.size() - 1));
  write_af_csv(cuts, af_surface(wf.x, 0, lmax, 4096), wf.x.size());
  std::cout << full_metrics_json(rep).dump(2) << "\n";
  return 0;
}

int cmd_certify(const CertifyArgs& a) {
  const auto wf = load_waveform(a.waveform);
  if (a.lag < 1 || a.lag >= wf.x.size()) throw ConfigError("lag must lie in 1..N-1");
  const double f_r = Rational::parse(a.fr).value();
  const auto h = lag_polynomial(wf.x, a.lag);
  const double n = static_cast<double>(wf.x.size());
  const double gamma = std::isinf(a.gamma_db) && a.gamma_db < 0 ? 0.0 : n * std::pow(10.0, a.gamma_db / 20.0);
  const auto res = certify_bound(h, gamma, f_r);
  if (res.status == CertifyStatus::Feasible) {
    std::printf("Feasible\n");
    if (res.certificate) {
      const auto r = certificate_residual(*res.certificate, segment_weights(f_r));
      std::printf("equality residual %.3e\npsd residual %.3e\n", r.equality, r.psd);
    }
  } else {
    std::printf("Infeasible\n");
  }
  std::printf("solver iterations %d\n", res.iterations);
  return 0;
}

int cmd_detect(const DetectArgs& a) {
  const RadarScene scene = scene_from_json([&] {
    try {
      return nlohmann::json::parse(read_text(a.scene));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("malformed scene: ") + e.what());
    }
  }());
  const auto wf = load_waveform(a.waveform);
  const std::size_t n = wf.x.size();
  std::size_t window = a.window;
  if (window == 0) {
    long last = 0;
    for (const auto& t : scene.targets) last = std::max(last, scene.delay_bin(t));
    window = static_cast<std::size_t>(last) + 2 * n;
  }
  const double span = scene.lambda_m * scene.fs_hz / 4.0;
  VelocityGrid grid{std::isnan(a.vmin) ? -span : a.vmin, std::isnan(a.vmax) ? span : a.vmax,
                    a.vcount ? a.vcount : 4 * n + 1};
  const auto r = synthesize_echo(wf.x, scene, window);
  const auto map = range_velocity_map(r, wf.x, scene, grid);
  const auto rep = false_alarm_report(map, scene);
  fs::create_directories(a.out);
  std::ofstream csv(fs::path(a.out) / "map.csv");
  write_map_csv(csv, map, scene);
  write_text((fs::path(a.out) / "report.json").string(), report_json(rep, scene, n).dump(2) + "\n");
  std::printf("threshold %.2f dB, %zu detections, %zu false alarms\n", rep.threshold_db, rep.detections, rep.false_alarms);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dtafopt: unimodular waveforms with low ambiguity sidelobes over a continuous Doppler band"};
  app.require_subcommand(1);

  DesignArgs da;
  auto* design = app.add_subcommand("design", "run an SROCR design (or the grid-constrained baseline)");
  design->add_option("--n", da.n, "sequence length");
  design->add_option("--l", da.l, "largest lag in the sidelobe region");
  design->add_option("--fr", da.fr, "Doppler half-width, e.g. 3/32");
  design->add_option("--zeta", da.zeta);
  design->add_option("--kappa", da.kappa);
  design->add_option("--eps", da.eps, "objective change stop, dB");
  design->add_option("--mode", da.mode)->check(CLI::IsMember({"trimmed", "paperfull"}));
  design->add_option("--style", da.style)->check(CLI::IsMember({"band", "grid"}));
  design->add_option("--m", da.m, "Doppler grid divisor M");
  design->add_option("--k", da.k, "Doppler grid half-count K");
  design->add_option("--seed", da.seed, "eigenspace tie-break seed");
  design->add_option("--cap", da.cap, "outer iteration cap");
  design->add_option("--out", da.out, "output directory");
  design->add_flag("--dump-sdp", da.dump_sdp, "write every iteration's conic problem");
  design->add_flag("-v,--verbose", da.verbose);

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "metrics and per-lag cuts of a waveform");
  eval->add_option("waveform", ea.waveform)->required();
  eval->add_option("--l", ea.l);
  eval->add_option("--fr", ea.fr);
  eval->add_option("--m", ea.m);
  eval->add_option("--k", ea.k);
  eval->add_option("--out", ea.out);

  CertifyArgs ca;
  auto* cert = app.add_subcommand("certify", "decide |A(l,f)|/N <= gamma on the band");
  cert->add_option("waveform", ca.waveform)->required();
  cert->add_option("--lag", ca.lag)->required();
  cert->add_option("--gamma-db", ca.gamma_db, "bound as 20 log10(gamma / N)")->required();
  cert->add_option("--fr", ca.fr);

  DetectArgs dd;
  auto* detect = app.add_subcommand("detect", "range-velocity map of a scene");
  detect->add_option("scene", dd.scene)->required();
  detect->add_option("waveform", dd.waveform)->required();
  detect->add_option("--out", dd.out);
  detect->add_option("--window", dd.window, "receive window in samples");
  detect->add_option("--vmin", dd.vmin);
  detect->add_option("--vmax", dd.vmax);
  detect->add_option("--vcount", dd.vcount);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 3;
  }

  try {
    if (*design) return cmd_design(da);
    if (*eval) return cmd_eval(ea);
    if (*cert) return cmd_certify(ca);
    if (*detect) return cmd_detect(dd);
  } catch (const DesignError& e) {
    std::fprintf(stderr, "design error: %s\n", e.what());
    return 2;
  } catch (const SolverStall& e) {
    std::fprintf(stderr, "solver stall: %s\n", e.what());
    return 4;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
