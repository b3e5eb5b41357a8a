// dpt: command-line front end for the quench simulator.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dpt/config.hpp"
#include "dpt/errors.hpp"
#include "dpt/experiment.hpp"

namespace {

using dpt::ExperimentConfig;

// Optional overrides collected from the command line, applied over the config file.
struct Overrides {
  std::string config_file;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> n;
  std::optional<double> alpha;
  std::optional<double> j0;
  bool from_trap = false;
  std::optional<double> nu_axial, nu_transverse, detuning;
  std::vector<double> ratios;
  std::optional<double> gradient;
  std::optional<double> tmax;
  std::optional<int> steps;
  std::optional<std::string> method, window;
  std::optional<double> scan_min, scan_max, scan_step;
  std::optional<int> shots, pooled;
  std::optional<bool> noise;
  std::optional<std::string> domain_mode;
  std::vector<int> dicke_sizes;
  std::optional<double> r_min, r_max, r_step;

  ExperimentConfig build() const {
    ExperimentConfig cfg;
    if (!config_file.empty()) cfg = dpt::load_config(config_file, cfg);
    if (out) cfg.output_dir = *out;
    if (n) cfg.n_ions = *n;
    if (alpha) cfg.alpha = *alpha, cfg.coupling_source = "power_law";
    if (j0) cfg.j0_hz = *j0;
    if (from_trap) cfg.coupling_source = "trap";
    if (nu_axial) cfg.nu_axial_hz = *nu_axial;
    if (nu_transverse) cfg.nu_transverse_hz = *nu_transverse;
    if (detuning) cfg.detuning_hz = *detuning;
    if (!ratios.empty()) cfg.ratios = ratios;
    if (gradient) cfg.gradient_hz = *gradient;
    if (tmax) cfg.tau_max = *tmax;
    if (steps) cfg.time_points = *steps;
    if (method) cfg.method = *method;
    if (window) cfg.window = *window;
    if (scan_min) cfg.scan_min = *scan_min;
    if (scan_max) cfg.scan_max = *scan_max;
    if (scan_step) cfg.scan_step = *scan_step;
    if (shots) cfg.shots_per_time = *shots;
    if (pooled) cfg.pooled_times = *pooled;
    if (noise) cfg.detection_noise = *noise;
    if (domain_mode) cfg.domain_mode = *domain_mode;
    if (!dicke_sizes.empty()) cfg.dicke_sizes = dicke_sizes;
    if (r_min) cfg.collective_r_min = *r_min;
    if (r_max) cfg.collective_r_max = *r_max;
    if (r_step) cfg.collective_r_step = *r_step;
    dpt::apply_environment(cfg);
    if (seed) cfg.seed = *seed;
    cfg.validate();
    return cfg;
  }
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_file, "key = value config file")->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--seed", o.seed, "master seed (overrides DPT_SEED)");
}

void add_chain(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--n", o.n, "number of ions");
  cmd->add_option("--nu-axial", o.nu_axial, "axial trap frequency [Hz]");
  cmd->add_option("--nu-transverse", o.nu_transverse, "transverse trap frequency [Hz]");
}

void add_couplings(CLI::App* cmd, Overrides& o) {
  add_chain(cmd, o);
  auto* a = cmd->add_option("--alpha", o.alpha, "power-law exponent (idealized couplings)");
  auto* t = cmd->add_flag("--from-trap", o.from_trap, "phonon-mediated couplings from the trap model");
  a->excludes(t);
  cmd->add_option("--j0", o.j0, "nearest-neighbour coupling J0 [Hz]");
  cmd->add_option("--detuning", o.detuning, "beatnote detuning above the COM mode [Hz]");
}

void add_dynamics(CLI::App* cmd, Overrides& o) {
  add_couplings(cmd, o);
  cmd->add_option("--tmax-2pij0t", o.tmax, "final time as 2 pi J0 t");
  cmd->add_option("--steps", o.steps, "number of time-grid points");
  cmd->add_option("--method", o.method, "auto | exact_diag | krylov");
  cmd->add_option("--gradient", o.gradient, "linear field gradient across the chain [Hz]");
}

void add_scan(CLI::App* cmd, Overrides& o) {
  add_dynamics(cmd, o);
  cmd->add_option("--min", o.scan_min, "smallest B~z/J0");
  cmd->add_option("--max", o.scan_max, "largest B~z/J0");
  cmd->add_option("--step", o.scan_step, "B~z/J0 spacing");
  cmd->add_option("--window", o.window, "cumulative | grid_mean");
}

void report(const std::vector<std::string>& files) {
  for (const auto& f : files) std::cout << f << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Long-range transverse-field Ising quench simulator"};
  app.require_subcommand(1);
  Overrides o;

  auto* modes = app.add_subcommand("modes", "equilibrium positions and transverse normal modes");
  add_common(modes, o);
  add_chain(modes, o);

  auto* couplings = app.add_subcommand("couplings", "Ising coupling matrix, J0, fitted alpha and Kac constant");
  add_common(couplings, o);
  add_couplings(couplings, o);

  std::vector<double> bb1_errors = {0.01, 0.02, 0.04, 0.05, 0.08, 0.1};
  auto* bb1 = app.add_subcommand("bb1", "pi/2 preparation infidelity, bare vs BB1");
  add_common(bb1, o);
  bb1->add_option("--eps", bb1_errors, "fractional amplitude errors");

  bool write_shots = false;
  auto* quench = app.add_subcommand("quench", "quench dynamics on a time grid (quench.csv)");
  add_common(quench, o);
  add_dynamics(quench, o);
  quench->add_option("--bt-over-j0", o.ratios, "field ratio(s) B~z/J0");
  quench->add_flag("--write-shots", write_shots, "also write late-time shot files");
  quench->add_option("--shots", o.shots, "shots per pooled time step");
  quench->add_option("--pooled", o.pooled, "number of late time steps sampled");
  quench->add_option("--noise", o.noise, "apply the detection-error model to written shots");

  auto* scan = app.add_subcommand("scan", "time-averaged C2 against B~z/J0 (scan.csv)");
  add_common(scan, o);
  add_scan(scan, o);

  std::vector<std::string> inputs;
  auto* domains = app.add_subcommand("domains", "domain statistics from shot files");
  add_common(domains, o);
  domains->add_option("inputs", inputs, "shot files")->required()->check(CLI::ExistingFile);
  domains->add_option("--mode", o.domain_mode, "both | bright_only");

  std::vector<double> cutoffs;
  auto* collective = app.add_subcommand("collective", "alpha = 0 long-time C2 dip (dip.csv)");
  add_common(collective, o);
  collective->add_option("--dicke-sizes", o.dicke_sizes, "finite N for the Dicke-sector rows");
  collective->add_option("--r-min", o.r_min);
  collective->add_option("--r-max", o.r_max);
  collective->add_option("--r-step", o.r_step);
  collective->add_option("--cutoff", cutoffs, "uncertainty cutoffs for extra N = inf rows (dip_cutoff.csv)");

  auto* thermal = app.add_subcommand("thermal", "canonical-ensemble comparison (thermal.csv)");
  add_common(thermal, o);
  add_scan(thermal, o);

  int figure = 0;
  std::string manifest;
  auto* reproduce = app.add_subcommand("reproduce", "figure recipe with manifest.json");
  add_common(reproduce, o);
  reproduce->add_option("--figure", figure, "figure recipe 2-6")->check(CLI::Range(2, 6));
  reproduce->add_option("--manifest", manifest, "rerun the configuration stored in a manifest")->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*reproduce) {
      ExperimentConfig cfg;
      if (!manifest.empty()) {
        const auto info = dpt::read_manifest(manifest);
        cfg = info.config;
        if (figure == 0) figure = info.figure;
        if (o.out) cfg.output_dir = *o.out;
        if (o.seed) cfg.seed = *o.seed;
        cfg.validate();
      } else {
        cfg = o.build();
      }
      if (figure == 0) throw dpt::ConfigError("reproduce needs --figure or --manifest");
      report(dpt::run_experiment(cfg, figure));
      return 0;
    }
    const auto cfg = o.build();
    if (*modes) report(dpt::write_modes(cfg));
    else if (*couplings) report(dpt::write_couplings(cfg));
    else if (*bb1) report(dpt::write_bb1(cfg, bb1_errors));
    else if (*quench) {
      report(dpt::write_quench(cfg));
      if (write_shots) report(dpt::write_shot_files(cfg));
    } else if (*scan) report(dpt::write_scan(cfg));
    else if (*domains) report(dpt::write_domains_from_files(cfg, inputs));
    else if (*collective) report(dpt::write_collective(cfg, cutoffs));
    else if (*thermal) report(dpt::write_thermal(cfg));
  } catch (const dpt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const dpt::NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const dpt::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
