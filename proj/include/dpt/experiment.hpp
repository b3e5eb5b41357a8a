#pragma once

#include <string>
#include <vector>

#include "dpt/config.hpp"
#include "dpt/couplings.hpp"
#include "dpt/evolution.hpp"
#include "dpt/ionchain.hpp"

namespace dpt {

/// Idealized J_ij = J0 / |i-j|^alpha (alpha = inf: nearest neighbours only).
CouplingMatrix synthesize_couplings_direct(int n, double J0, double alpha);

/// Trap-derived couplings with the Rabi frequency calibrated to j0_hz, or the
/// idealized power law, depending on cfg.coupling_source.
CouplingMatrix build_couplings(const ExperimentConfig& cfg);

TrapConfig trap_config(const ExperimentConfig& cfg);
LaserConfig laser_config(const ExperimentConfig& cfg);

/// "auto" picks exact diagonalization up to 10 spins and Krylov above.
EvolveOptions evolve_options(const ExperimentConfig& cfg);

std::vector<double> time_grid(const ExperimentConfig& cfg);
std::vector<double> scan_grid(const ExperimentConfig& cfg);

// Stages. Each writes into cfg.output_dir and returns the files it produced.
// Every CSV starts with `# config_hash=...`.
std::vector<std::string> write_modes(const ExperimentConfig& cfg);
std::vector<std::string> write_couplings(const ExperimentConfig& cfg);
std::vector<std::string> write_bb1(const ExperimentConfig& cfg, const std::vector<double>& errors);
std::vector<std::string> write_quench(const ExperimentConfig& cfg);
std::vector<std::string> write_scan(const ExperimentConfig& cfg);
std::vector<std::string> write_thermal(const ExperimentConfig& cfg);
std::vector<std::string> write_shot_files(const ExperimentConfig& cfg);
std::vector<std::string> write_domain_scan(const ExperimentConfig& cfg);
std::vector<std::string> write_largest_domains(const ExperimentConfig& cfg);
std::vector<std::string> write_domains_from_files(const ExperimentConfig& cfg, const std::vector<std::string>& inputs);
std::vector<std::string> write_collective(const ExperimentConfig& cfg, std::vector<double> cutoffs = {});

/// Figure recipes 2-6 plus manifest.json describing the run.
std::vector<std::string> run_experiment(const ExperimentConfig& cfg, int figure);

/// Config and figure stored in a manifest written by run_experiment.
struct ManifestInfo {
  ExperimentConfig config;
  int figure = 0;
};
ManifestInfo read_manifest(const std::string& path);

}  // namespace dpt
