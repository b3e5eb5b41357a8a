#include "dpt/shots.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "dpt/errors.hpp"
#include "dpt/random.hpp"

namespace dpt {

char axis_label(Axis a) {
  switch (a) {
    case Axis::X: return 'x';
    case Axis::Y: return 'y';
    case Axis::Z: return 'z';
  }
  return '?';
}

Axis parse_axis(const std::string& s) {
  if (s == "x") return Axis::X;
  if (s == "y") return Axis::Y;
  if (s == "z") return Axis::Z;
  throw ConfigError("unknown measurement basis '" + s + "'");
}

ShotRecord sample_shots(const SpinState& state, int n_shots, Axis basis, std::uint64_t seed, double time_tag) {
  if (n_shots < 1) throw ConfigError("sample_shots: n_shots must be >= 1");
  const SpinState rotated = rotate_to_measurement_basis(state, basis);
  const auto amp = rotated.amplitudes();
  std::vector<double> cdf(amp.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < amp.size(); ++k) {
    acc += std::norm(amp[k]);
    cdf[k] = acc;
  }
  ShotRecord rec;
  rec.n_qubits = state.n_qubits();
  rec.seed = seed;
  rec.basis = basis;
  rec.time = time_tag;
  rec.shots.assign(static_cast<std::size_t>(n_shots), std::string(static_cast<std::size_t>(rec.n_qubits), '0'));
  const int n = rec.n_qubits;
#pragma omp parallel for schedule(static)
  for (int s = 0; s < n_shots; ++s) {
    auto g = rng::engine(seed, static_cast<std::uint64_t>(s));
    const double u = rng::uniform(g) * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    const auto idx = static_cast<std::uint64_t>(it - cdf.begin());
    auto& shot = rec.shots[static_cast<std::size_t>(s)];
    for (int i = 0; i < n; ++i) shot[static_cast<std::size_t>(i)] = (idx >> i & 1u) ? '1' : '0';
  }
  return rec;
}

ShotRecord apply_detection_noise(const ShotRecord& record, const DetectionNoise& noise, std::uint64_t seed) {
  const auto valid = [](double p) { return p >= 0.0 && p <= 0.5; };
  if (!valid(noise.p_flip) || !valid(noise.p_crosstalk))
    throw ConfigError("detection noise probabilities must lie in [0, 0.5]");
  ShotRecord out = record;
  if (noise.p_flip == 0.0 && noise.p_crosstalk == 0.0) return out;
  const auto count = static_cast<long>(record.shots.size());
#pragma omp parallel for schedule(static)
  for (long s = 0; s < count; ++s) {
    auto g = rng::engine(seed, static_cast<std::uint64_t>(s));
    const auto& truth = record.shots[static_cast<std::size_t>(s)];
    auto& shot = out.shots[static_cast<std::size_t>(s)];
    const std::size_t n = truth.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (truth[i] != '0') continue;
      int bright_neighbours = 0;
      if (i > 0 && truth[i - 1] == '1') ++bright_neighbours;
      if (i + 1 < n && truth[i + 1] == '1') ++bright_neighbours;
      for (int b = 0; b < bright_neighbours; ++b)
        if (rng::uniform(g) < noise.p_crosstalk) shot[i] = '1';
    }
    for (std::size_t i = 0; i < n; ++i)
      if (rng::uniform(g) < noise.p_flip) shot[i] = shot[i] == '1' ? '0' : '1';
  }
  return out;
}

namespace {

double spin_sum(const std::string& shot) {
  double s = 0.0;
  for (char c : shot) s += c == '1' ? 1.0 : -1.0;
  return s;
}

Estimate mean_and_se(const std::vector<double>& v) {
  const auto n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double var = v.size() > 1 ? ss / (n - 1.0) : 0.0;
  return {mean, std::sqrt(var / n)};
}

}  // namespace

Estimate estimate_c2(const ShotRecord& record) {
  if (record.shots.size() < 2) throw ConfigError("estimate_c2: need at least two shots");
  const double n = record.n_qubits;
  std::vector<double> per_shot;
  per_shot.reserve(record.shots.size());
  for (const auto& shot : record.shots) {
    const double m = spin_sum(shot) / n;
    per_shot.push_back(m * m);
  }
  return mean_and_se(per_shot);
}

Estimate estimate_magnetization(const ShotRecord& record) {
  if (record.shots.size() < 2) throw ConfigError("estimate_magnetization: need at least two shots");
  std::vector<double> per_shot;
  per_shot.reserve(record.shots.size());
  for (const auto& shot : record.shots) per_shot.push_back(spin_sum(shot) / record.n_qubits);
  return mean_and_se(per_shot);
}

DomainMode parse_domain_mode(const std::string& s) {
  if (s == "both") return DomainMode::Both;
  if (s == "bright_only") return DomainMode::BrightOnly;
  throw ConfigError("unknown domain mode '" + s + "' (expected both or bright_only)");
}

std::vector<int> domain_lengths(const std::string& shot, DomainMode mode) {
  std::vector<int> runs;
  std::size_t i = 0;
  while (i < shot.size()) {
    std::size_t j = i;
    while (j < shot.size() && shot[j] == shot[i]) ++j;
    if (mode == DomainMode::Both || shot[i] == '1') runs.push_back(static_cast<int>(j - i));
    i = j;
  }
  return runs;
}

DomainHistogram domain_histogram(const ShotRecord& record, DomainMode mode) {
  if (record.shots.empty()) throw ConfigError("domain_histogram: no shots");
  DomainHistogram h;
  for (const auto& shot : record.shots)
    for (int len : domain_lengths(shot, mode)) ++h[len];
  return h;
}

GammaFit fit_gamma(const std::vector<double>& samples) {
  if (samples.size() < 2) throw FitError("fit_gamma: need at least two samples");
  double mean = 0.0, mean_log = 0.0;
  for (double x : samples) {
    if (!(x > 0.0)) throw FitError("fit_gamma: samples must be positive");
    mean += x;
    mean_log += std::log(x);
  }
  const auto n = static_cast<double>(samples.size());
  mean /= n;
  mean_log /= n;
  double var = 0.0;
  for (double x : samples) var += (x - mean) * (x - mean);
  var /= n;
  const double s = std::log(mean) - mean_log;
  if (!(var > 0.0) || !(s > 1e-14)) throw FitError("fit_gamma: degenerate sample (all values equal)");

  double k = mean * mean / var;
  GammaFit fit;
  for (int it = 1; it <= 100; ++it) {
    const double f = std::log(k) - boost::math::digamma(k) - s;
    const double df = 1.0 / k - boost::math::trigamma(k);
    double next = k - f / df;
    if (!(next > 0.0)) next = 0.5 * k;
    const double change = std::abs(next - k);
    k = next;
    fit.iterations = it;
    if (change <= 1e-12 * k) break;
  }
  fit.shape = k;
  fit.scale = mean / k;
  return fit;
}

LargestDomainStats largest_domain_stats(const std::vector<int>& largest, std::size_t min_fit) {
  if (largest.empty()) throw ConfigError("largest_domain_stats: no samples");
  LargestDomainStats st;
  st.largest_per_shot = largest;
  std::vector<double> values(largest.begin(), largest.end());
  const auto e = mean_and_se(values);
  st.mean = e.value;
  st.sem = e.error;
  const bool degenerate = std::all_of(largest.begin(), largest.end(), [&](int v) { return v == largest.front(); });
  const bool positive = std::all_of(largest.begin(), largest.end(), [](int v) { return v > 0; });
  if (largest.size() >= min_fit && !degenerate && positive) {
    try {
      st.gamma = fit_gamma(values);
    } catch (const FitError&) {
      st.gamma.reset();
    }
  }
  return st;
}

LargestDomainStats largest_domain_stats(const ShotRecord& record, DomainMode mode, std::size_t min_fit) {
  if (record.shots.empty()) throw ConfigError("largest_domain_stats: no shots");
  std::vector<int> largest;
  largest.reserve(record.shots.size());
  for (const auto& shot : record.shots) {
    const auto runs = domain_lengths(shot, mode);
    largest.push_back(runs.empty() ? 0 : *std::max_element(runs.begin(), runs.end()));
  }
  return largest_domain_stats(largest, min_fit);
}

TailFit fit_exponential_tail(const DomainHistogram& hist, long min_count, int max_length) {
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  TailFit fit;
  for (const auto& [len, count] : hist) {
    if (count < min_count || (max_length > 0 && len > max_length)) continue;
    const double w = static_cast<double>(count);  // var(log count) ~ 1/count
    const double y = std::log(static_cast<double>(count));
    sw += w;
    sx += w * len;
    sy += w * y;
    sxx += w * len * len;
    sxy += w * len * y;
    ++fit.points;
  }
  if (fit.points < 2) throw FitError("fit_exponential_tail: fewer than two populated bins");
  const double det = sw * sxx - sx * sx;
  fit.slope = (sw * sxy - sx * sy) / det;
  fit.intercept = (sy - fit.slope * sx) / sw;
  return fit;
}

void write_shots(std::ostream& os, const ShotRecord& record) {
  std::ostringstream t;
  t.precision(17);
  t << record.time;
  os << "#n_qubits=" << record.n_qubits << " seed=" << record.seed << " basis=" << axis_label(record.basis)
     << " t=" << t.str() << '\n';
  for (const auto& s : record.shots) os << s << '\n';
}

ShotRecord read_shots(std::istream& is) {
  ShotRecord rec;
  std::string line;
  bool header = false;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream fields(line.substr(1));
      std::string kv;
      while (fields >> kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) continue;
        const auto key = kv.substr(0, eq);
        const auto value = kv.substr(eq + 1);
        try {
          if (key == "n_qubits") rec.n_qubits = std::stoi(value), header = true;
          else if (key == "seed") rec.seed = std::stoull(value);
          else if (key == "basis") rec.basis = parse_axis(value);
          else if (key == "t") rec.time = std::stod(value);
        } catch (const std::logic_error&) {
          throw ConfigError("shot file: bad header field '" + kv + "'");
        }
      }
      continue;
    }
    if (line.find_first_not_of("01") != std::string::npos) throw ConfigError("shot file: non-binary line '" + line + "'");
    rec.shots.push_back(line);
  }
  if (!header) {
    if (rec.shots.empty()) throw ConfigError("shot file: no header and no shots");
    rec.n_qubits = static_cast<int>(rec.shots.front().size());
  }
  for (const auto& s : rec.shots)
    if (static_cast<int>(s.size()) != rec.n_qubits) throw ConfigError("shot file: shot length differs from n_qubits");
  return rec;
}

ShotRecord pool_shots(const std::vector<ShotRecord>& records) {
  if (records.empty()) throw ConfigError("pool_shots: nothing to pool");
  ShotRecord out = records.front();
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].n_qubits != out.n_qubits) throw ConfigError("pool_shots: mismatched widths");
    out.shots.insert(out.shots.end(), records[r].shots.begin(), records[r].shots.end());
  }
  return out;
}

}  // namespace dpt
