#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dpt/control.hpp"
#include "dpt/spin_state.hpp"

namespace dpt {

/// Projective readout results. Character i of a shot is site i+1; '1' is bright
/// (|up> along the measured axis).
struct ShotRecord {
  int n_qubits = 0;
  std::vector<std::string> shots;
  std::uint64_t seed = 0;
  Axis basis = Axis::X;
  double time = 0.0;  // free-form tag, 2 pi J0 t in the pipelines

  std::size_t size() const { return shots.size(); }
};

char axis_label(Axis a);
Axis parse_axis(const std::string& s);

/// Born-rule sampling after rotating every spin into `basis`. Shot k uses its
/// own stream derived from (seed, k).
ShotRecord sample_shots(const SpinState& state, int n_shots, Axis basis, std::uint64_t seed, double time_tag = 0.0);

struct DetectionNoise {
  double p_flip = 0.01;
  double p_crosstalk = 0.01;  // dark read as bright, per bright nearest neighbour
};

/// Crosstalk from the true bright neighbours is applied first, then
/// independent symmetric flips.
ShotRecord apply_detection_noise(const ShotRecord& record, const DetectionNoise& noise, std::uint64_t seed);

struct Estimate {
  double value = 0.0;
  double error = 0.0;  // standard error
};

/// Mean over shots of (sum_i s_i)^2 / N^2 with s_i = +-1; SE = sample std / sqrt(n).
Estimate estimate_c2(const ShotRecord& record);

/// Mean over shots of sum_i s_i / N.
Estimate estimate_magnetization(const ShotRecord& record);

enum class DomainMode { Both, BrightOnly };
DomainMode parse_domain_mode(const std::string& s);

using DomainHistogram = std::map<int, long>;  // length -> count

std::vector<int> domain_lengths(const std::string& shot, DomainMode mode);
DomainHistogram domain_histogram(const ShotRecord& record, DomainMode mode = DomainMode::Both);

struct GammaFit {
  double shape = 0.0;
  double scale = 0.0;
  int iterations = 0;
  double mean() const { return shape * scale; }
};

/// Maximum-likelihood Gamma(shape, scale): Newton on log k - digamma(k) = log mean - mean log,
/// started from the method-of-moments shape. Throws FitError on degenerate or non-positive data.
GammaFit fit_gamma(const std::vector<double>& samples);

struct LargestDomainStats {
  std::vector<int> largest_per_shot;
  double mean = 0.0;
  double sem = 0.0;
  std::optional<GammaFit> gamma;  // unset when fewer than min_fit samples or all equal
};

/// Largest domain of each shot with mean, SEM and a Gamma fit.
LargestDomainStats largest_domain_stats(const ShotRecord& record, DomainMode mode = DomainMode::Both,
                                        std::size_t min_fit = 30);
LargestDomainStats largest_domain_stats(const std::vector<int>& largest, std::size_t min_fit = 30);

struct TailFit {
  double slope = 0.0;  // d log(count) / d length
  double intercept = 0.0;
  int points = 0;
};

/// Count-weighted least squares of log(count) against length over bins with at
/// least `min_count` entries and length <= max_length (0: no limit).
TailFit fit_exponential_tail(const DomainHistogram& hist, long min_count = 50, int max_length = 0);

/// Shot file: header `#n_qubits=N seed=S basis=x t=T`, then one '0'/'1' line per shot.
void write_shots(std::ostream& os, const ShotRecord& record);
ShotRecord read_shots(std::istream& is);

/// Concatenates records of equal width (the seed and tags of the first are kept).
ShotRecord pool_shots(const std::vector<ShotRecord>& records);

}  // namespace dpt
