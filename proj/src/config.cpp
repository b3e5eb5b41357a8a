#include "dpt/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>
#include <type_traits>

#include "dpt/errors.hpp"
#include "dpt/random.hpp"

namespace dpt {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ConfigError("config: '" + key + "' expects a number, got '" + s + "'");
  return v;
}

template <class Int>
Int to_int(const std::string& key, const std::string& s) {
  Int v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ConfigError("config: '" + key + "' expects an integer, got '" + s + "'");
  return v;
}

bool to_bool(const std::string& key, const std::string& s) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("config: '" + key + "' expects true/false, got '" + s + "'");
}

struct Field {
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&, const std::string&)> set;
};

template <class T>
Field number(T ExperimentConfig::*m) {
  Field f;
  f.get = [m](const ExperimentConfig& c) {
    if constexpr (std::is_floating_point_v<T>) return format_double(c.*m);
    else return std::to_string(c.*m);
  };
  f.set = [m](ExperimentConfig& c, const std::string& k, const std::string& v) {
    if constexpr (std::is_floating_point_v<T>) c.*m = to_double(k, v);
    else c.*m = to_int<T>(k, v);
  };
  return f;
}

Field text(std::string ExperimentConfig::*m) {
  return {[m](const ExperimentConfig& c) { return c.*m; },
          [m](ExperimentConfig& c, const std::string&, const std::string& v) { c.*m = v; }};
}

Field flag(bool ExperimentConfig::*m) {
  return {[m](const ExperimentConfig& c) { return std::string(c.*m ? "true" : "false"); },
          [m](ExperimentConfig& c, const std::string& k, const std::string& v) { c.*m = to_bool(k, v); }};
}

template <class T>
Field list(std::vector<T> ExperimentConfig::*m) {
  Field f;
  f.get = [m](const ExperimentConfig& c) {
    std::string s;
    for (std::size_t i = 0; i < (c.*m).size(); ++i) {
      if (i) s += ",";
      if constexpr (std::is_floating_point_v<T>) s += format_double((c.*m)[i]);
      else s += std::to_string((c.*m)[i]);
    }
    return s;
  };
  f.set = [m](ExperimentConfig& c, const std::string& k, const std::string& v) {
    std::vector<T> out;
    for (const auto& item : split(v, ',')) {
      if constexpr (std::is_floating_point_v<T>) out.push_back(to_double(k, item));
      else out.push_back(to_int<T>(k, item));
    }
    c.*m = std::move(out);
  };
  return f;
}

const std::map<std::string, Field>& fields() {
  using C = ExperimentConfig;
  static const std::map<std::string, Field> table = {
      {"n_ions", number(&C::n_ions)},
      {"coupling_source", text(&C::coupling_source)},
      {"j0_hz", number(&C::j0_hz)},
      {"alpha", number(&C::alpha)},
      {"nu_axial_hz", number(&C::nu_axial_hz)},
      {"nu_transverse_hz", number(&C::nu_transverse_hz)},
      {"detuning_hz", number(&C::detuning_hz)},
      {"recoil_hz", number(&C::recoil_hz)},
      {"coupling_sign", number(&C::coupling_sign)},
      {"ratios", list(&C::ratios)},
      {"gradient_hz", number(&C::gradient_hz)},
      {"time_points", number(&C::time_points)},
      {"tau_max", number(&C::tau_max)},
      {"method", text(&C::method)},
      {"krylov_tolerance", number(&C::krylov_tolerance)},
      {"window", text(&C::window)},
      {"scan_min", number(&C::scan_min)},
      {"scan_max", number(&C::scan_max)},
      {"scan_step", number(&C::scan_step)},
      {"shots_per_time", number(&C::shots_per_time)},
      {"pooled_times", number(&C::pooled_times)},
      {"detection_noise", flag(&C::detection_noise)},
      {"p_flip", number(&C::p_flip)},
      {"p_crosstalk", number(&C::p_crosstalk)},
      {"domain_mode", text(&C::domain_mode)},
      {"basis", text(&C::basis)},
      {"dicke_sizes", list(&C::dicke_sizes)},
      {"collective_r_min", number(&C::collective_r_min)},
      {"collective_r_max", number(&C::collective_r_max)},
      {"collective_r_step", number(&C::collective_r_step)},
      {"seed", number(&C::seed)},
      {"output_dir", text(&C::output_dir)},
  };
  return table;
}

}  // namespace

void ExperimentConfig::validate() const {
  const auto fail = [](const std::string& m) { throw ConfigError("config: " + m); };
  if (n_ions < 1) fail("n_ions must be >= 1");
  if (coupling_source != "power_law" && coupling_source != "trap") fail("coupling_source must be power_law or trap");
  if (!(j0_hz > 0.0)) fail("j0_hz must be positive");
  if (!(alpha >= 0.0)) fail("alpha must be >= 0 (inf allowed)");
  if (!(nu_axial_hz > 0.0) || !(nu_transverse_hz > nu_axial_hz)) fail("need 0 < nu_axial_hz < nu_transverse_hz");
  if (coupling_sign != 1 && coupling_sign != -1) fail("coupling_sign must be 1 or -1");
  for (double r : ratios)
    if (!(r >= 0.0) || !std::isfinite(r)) fail("ratios must be finite and >= 0");
  if (time_points < 1) fail("time_points must be >= 1");
  if (!(tau_max > 0.0)) fail("tau_max must be positive");
  if (method != "auto" && method != "exact_diag" && method != "krylov") fail("method must be auto, exact_diag or krylov");
  if (!(krylov_tolerance > 0.0)) fail("krylov_tolerance must be positive");
  if (window != "cumulative" && window != "grid_mean") fail("window must be cumulative or grid_mean");
  if (!(scan_step > 0.0) || !(scan_max >= scan_min) || scan_min < 0.0) fail("bad scan grid");
  if (shots_per_time < 2) fail("shots_per_time must be >= 2");
  if (pooled_times < 1 || pooled_times > time_points) fail("pooled_times must lie in [1, time_points]");
  if (!(p_flip >= 0.0 && p_flip <= 0.5) || !(p_crosstalk >= 0.0 && p_crosstalk <= 0.5))
    fail("noise probabilities must lie in [0, 0.5]");
  if (domain_mode != "both" && domain_mode != "bright_only") fail("domain_mode must be both or bright_only");
  if (basis != "x" && basis != "y" && basis != "z") fail("basis must be x, y or z");
  for (int n : dicke_sizes)
    if (n < 1) fail("dicke_sizes must be positive");
  if (!(collective_r_step > 0.0) || !(collective_r_max >= collective_r_min) || collective_r_min < 0.0)
    fail("bad collective r grid");
}

std::map<std::string, std::string> to_key_values(const ExperimentConfig& cfg) {
  std::map<std::string, std::string> kv;
  for (const auto& [key, field] : fields()) kv[key] = field.get(cfg);
  return kv;
}

ExperimentConfig apply_key_values(ExperimentConfig base, const std::map<std::string, std::string>& kv) {
  const auto& table = fields();
  for (const auto& [key, value] : kv) {
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError("config: unknown key '" + key + "'");
    it->second.set(base, key, value);
  }
  return base;
}

std::map<std::string, std::string> parse_key_values(std::istream& is) {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return apply_key_values(std::move(base), parse_key_values(in));
}

std::string serialize(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& [key, value] : to_key_values(cfg)) out += key + " = " + value + "\n";
  return out;
}

std::string config_hash(const ExperimentConfig& cfg) {
  auto kv = to_key_values(cfg);
  kv.erase("output_dir");
  std::string canon;
  for (const auto& [key, value] : kv) canon += key + "=" + value + "\n";
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(rng::fnv1a(canon)));
  return buf;
}

void apply_environment(ExperimentConfig& cfg) {
  if (const char* s = std::getenv("DPT_SEED"); s && *s) cfg.seed = to_int<std::uint64_t>("DPT_SEED", trim(s));
}

std::uint64_t stage_seed(const ExperimentConfig& cfg, const std::string& label) { return rng::labeled_seed(cfg.seed, label); }

std::vector<double> arithmetic_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || hi < lo) throw ConfigError("arithmetic_grid: need step > 0 and hi >= lo");
  const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  for (long k = 0; k < count; ++k) out.push_back(std::round((lo + k * step) * 1e12) / 1e12);
  return out;
}

}  // namespace dpt
