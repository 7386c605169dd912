#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dtafopt/errors.hpp"
#include "dtafopt/linalg.hpp"

namespace dtafopt {

struct WaveformFile {
  ComplexSequence x;
  nlohmann::json meta = nlohmann::json::object();
};

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Sequence values are written with 17 significant digits so that reading
// them back is bit-exact.
inline std::string waveform_json(const ComplexSequence& x, const std::string& spec, double ntpsl_db) {
  std::ostringstream os;
  os << "{\n  \"n\": " << x.size() << ",\n  \"seq_re\": [";
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << fmt17(x[i].real());
  os << "],\n  \"seq_im\": [";
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << fmt17(x[i].imag());
  os << "],\n  \"meta\": {\"spec\": " << nlohmann::json(spec).dump() << ", \"ntpsl_db\": "
     << (std::isfinite(ntpsl_db) ? fmt17(ntpsl_db) : std::string("null")) << "}\n}\n";
  return os.str();
}

inline WaveformFile parse_waveform(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    const auto re = j.at("seq_re").get<std::vector<double>>();
    const auto im = j.at("seq_im").get<std::vector<double>>();
    const auto n = j.at("n").get<std::size_t>();
    if (re.size() != n || im.size() != n) throw ConfigError("waveform length does not match \"n\"");
    std::vector<cplx> v(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(re[i]) || !std::isfinite(im[i])) throw ConfigError("non-finite waveform entry");
      v[i] = cplx(re[i], im[i]);
    }
    WaveformFile w{ComplexSequence(std::move(v)), j.value("meta", nlohmann::json::object())};
    return w;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed waveform file: ") + e.what());
  } catch (const DimensionError& e) {
    throw ConfigError(std::string("malformed waveform file: ") + e.what());
  }
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
}

inline WaveformFile load_waveform(const std::string& path) { return parse_waveform(read_text(path)); }

}  // namespace dtafopt
