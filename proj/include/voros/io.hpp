#pragma once

// Persistence: spectrum files and reports as JSON, spectra as CSV.
// Doubles are written in the shortest form that parses back to the same
// binary64 value, so save/load round-trips bit-exactly.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstddef>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "voros/errors.hpp"
#include "voros/product.hpp"
#include "voros/roots.hpp"
#include "voros/rotation.hpp"

namespace voros {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

inline constexpr const char* kSignConventionNote =
    "internal spectral variable s = -lambda, lambda as in -w'' + (-1)^l (iz)^m w = lambda w; "
    "product and determinant zeros are positive in s, zeros of C and D are negative in s and "
    "are reported as positive eigenvalues in lambda";

struct Provenance {
  std::string command_line;
  std::string timestamp;
  json parameters = json::object();
};

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

inline std::string join_command_line(int argc, const char* const* argv) {
  std::string out;
  for (int i = 0; i < argc; ++i) {
    if (i > 0)
      out += ' ';
    out += argv[i];
  }
  return out;
}

struct SpectrumFile {
  int schema_version = kSchemaVersion;
  double alpha = 0.0;
  double phase_offset = 0.0;
  std::optional<double> m;
  std::vector<double> levels;
  std::optional<ZeroTail> tail;
  double residual = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  Provenance provenance;

  RotationParams rotation() const { return RotationParams::from_alpha(alpha, phase_offset); }
  EntireProduct product() const { return make_product(levels, tail); }
};

inline json to_json(const Provenance& p) {
  return json{{"command_line", p.command_line}, {"timestamp", p.timestamp}, {"parameters", p.parameters}};
}

inline json to_json(const SpectrumFile& s) {
  json j;
  j["schema_version"] = s.schema_version;
  j["alpha"] = s.alpha;
  j["phase_offset"] = s.phase_offset;
  j["m"] = s.m ? json(*s.m) : json(nullptr);
  j["levels"] = s.levels;
  if (s.tail)
    j["tail"] = json{{"amplitude", s.tail->amplitude},
                     {"exponent", s.tail->exponent},
                     {"shift", s.tail->index_shift},
                     {"start_index", s.tail->start_index}};
  else
    j["tail"] = nullptr;
  j["residual"] = s.residual;
  j["iterations"] = s.iterations;
  j["converged"] = s.converged;
  j["provenance"] = to_json(s.provenance);
  return j;
}

namespace detail {

inline const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw FormatError(std::string("missing field '") + key + "'");
  return j.at(key);
}

inline double number_field(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number())
    throw FormatError(std::string("field '") + key + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x))
    throw FormatError(std::string("field '") + key + "' must be finite");
  return x;
}

inline std::size_t count_field(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number_unsigned())
    throw FormatError(std::string("field '") + key + "' must be a non-negative integer");
  return v.get<std::size_t>();
}

} // namespace detail

inline SpectrumFile spectrum_from_json(const json& j) {
  using detail::field;
  using detail::number_field;
  SpectrumFile s;
  if (!j.is_object())
    throw FormatError("spectrum file must hold a JSON object");
  const json& version = field(j, "schema_version");
  if (!version.is_number_integer() || version.get<int>() != kSchemaVersion)
    throw FormatError("unsupported schema_version");
  s.alpha = number_field(j, "alpha");
  s.phase_offset = number_field(j, "phase_offset");
  if (j.contains("m") && !j.at("m").is_null())
    s.m = number_field(j, "m");
  const json& levels = field(j, "levels");
  if (!levels.is_array() || levels.empty())
    throw FormatError("field 'levels' must be a non-empty array");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!levels[i].is_number())
      throw FormatError("level " + std::to_string(i + 1) + " is not a number");
    s.levels.push_back(levels[i].get<double>());
  }
  const json& tail = field(j, "tail");
  if (!tail.is_null()) {
    ZeroTail t;
    t.amplitude = number_field(tail, "amplitude");
    t.exponent = number_field(tail, "exponent");
    t.index_shift = number_field(tail, "shift");
    t.start_index = detail::count_field(tail, "start_index");
    s.tail = t;
  }
  s.residual = number_field(j, "residual");
  if (s.residual < 0.0)
    throw FormatError("field 'residual' must be non-negative");
  s.iterations = detail::count_field(j, "iterations");
  const json& converged = field(j, "converged");
  if (!converged.is_boolean())
    throw FormatError("field 'converged' must be a boolean");
  s.converged = converged.get<bool>();
  if (j.contains("provenance")) {
    const json& p = j.at("provenance");
    if (!p.is_object())
      throw FormatError("field 'provenance' must be an object");
    s.provenance.command_line = p.value("command_line", "");
    s.provenance.timestamp = p.value("timestamp", "");
    s.provenance.parameters = p.value("parameters", json::object());
  }
  try {
    (void)s.rotation();
  } catch (const DomainError& e) {
    throw FormatError(std::string("invalid rotation: ") + e.what());
  }
  try {
    (void)s.product();
  } catch (const ValidationError& e) {
    throw FormatError(std::string("inconsistent levels or tail: ") + e.what());
  }
  return s;
}

inline SpectrumFile parse_spectrum(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("not valid JSON: ") + e.what());
  }
  try {
    return spectrum_from_json(j);
  } catch (const json::exception& e) {
    throw FormatError(std::string("unexpected JSON content: ") + e.what());
  }
}

inline SpectrumFile load_spectrum(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw FormatError("cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_spectrum(buffer.str());
}

inline void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out)
    throw Error("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
  if (!out)
    throw Error("write to '" + path + "' failed");
}

inline void save_spectrum(const std::string& path, const SpectrumFile& s) { write_json(path, to_json(s)); }

inline json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

/// Infinite margins (no samples) are written as null.
inline json margin_json(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline json to_json(const EigenvalueSet& set) {
  json values = json::array();
  for (std::size_t i = 0; i < set.size(); ++i)
    values.push_back(json{{"re", set.values[i].real()},
                          {"im", set.values[i].imag()},
                          {"real", static_cast<bool>(set.real_flags[i])},
                          {"multiple", static_cast<bool>(set.multiple_flags[i])}});
  const Rect& r = set.window.rect;
  return json{{"method", to_string(set.method)},
              {"values", values},
              {"reality_tolerance", set.reality_tolerance},
              {"window", json{{"re", {r.re_lo, r.re_hi}}, {"im", {r.im_lo, r.im_hi}}, {"real_axis", set.window.real_axis}}},
              {"partial", set.partial}};
}

// ---------------------------------------------------------------------------
// CSV

inline constexpr const char* kCsvHeader = "index,re,im,method";

inline std::string format_double(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

inline void write_csv(std::ostream& os, const EigenvalueSet& set, bool header = true) {
  if (header)
    os << kCsvHeader << '\n';
  for (std::size_t i = 0; i < set.size(); ++i)
    os << i + 1 << ',' << format_double(set.values[i].real()) << ',' << format_double(set.values[i].imag()) << ','
       << to_string(set.method) << '\n';
}

} // namespace voros
