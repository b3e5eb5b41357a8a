#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace dpt {

/// Everything a run depends on. Serialized as flat `key = value` text; lists
/// are comma separated. See README for the key reference.
struct ExperimentConfig {
  int n_ions = 12;

  // couplings: "power_law" (J0 / |i-j|^alpha) or "trap" (phonon-mediated)
  std::string coupling_source = "power_law";
  double j0_hz = 380.0;
  double alpha = 0.8;
  double nu_axial_hz = 400e3;
  double nu_transverse_hz = 4.85e6;
  double detuning_hz = 82e3;  // beatnote above the COM mode
  double recoil_hz = 18.5e3;
  int coupling_sign = 1;

  // quench
  std::vector<double> ratios = {0.6, 0.8, 1.6};  // B~z / J0
  double gradient_hz = 0.0;
  int time_points = 21;
  double tau_max = 4.8;  // 2 pi J0 t
  std::string method = "auto";  // auto, exact_diag, krylov
  double krylov_tolerance = 1e-10;
  std::string window = "cumulative";

  // field scans
  double scan_min = 0.1;
  double scan_max = 2.0;
  double scan_step = 0.1;

  // shots
  int shots_per_time = 200;
  int pooled_times = 5;
  bool detection_noise = true;
  double p_flip = 0.01;
  double p_crosstalk = 0.01;
  std::string domain_mode = "both";
  std::string basis = "x";

  // collective
  std::vector<int> dicke_sizes = {16, 64, 256, 1024};
  double collective_r_min = 0.0;
  double collective_r_max = 2.0;
  double collective_r_step = 0.05;

  std::uint64_t seed = 20170829;
  std::string output_dir = "out";

  /// Throws ConfigError on any inconsistent or out-of-range value.
  void validate() const;
};

/// Canonical key -> value text (sorted keys, round-trippable numbers).
std::map<std::string, std::string> to_key_values(const ExperimentConfig& cfg);

/// Applies key/value pairs over `base`; unknown keys and bad values throw ConfigError.
ExperimentConfig apply_key_values(ExperimentConfig base, const std::map<std::string, std::string>& kv);

/// Parses `key = value` lines ('#' starts a comment).
std::map<std::string, std::string> parse_key_values(std::istream& is);
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});

std::string serialize(const ExperimentConfig& cfg);

/// FNV-1a over the canonical serialization, as 16 hex digits. output_dir is
/// excluded so moving a run does not change its identity.
std::string config_hash(const ExperimentConfig& cfg);

/// DPT_SEED, when set, replaces the master seed.
void apply_environment(ExperimentConfig& cfg);

/// Independent stream seed for a named pipeline stage.
std::uint64_t stage_seed(const ExperimentConfig& cfg, const std::string& label);

/// Round-trippable decimal form of a double.
std::string format_double(double v);

/// Inclusive arithmetic grid lo, lo + step, ... <= hi (+ rounding slack).
std::vector<double> arithmetic_grid(double lo, double hi, double step);

}  // namespace dpt
