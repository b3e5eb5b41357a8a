#include "dpt/experiment.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <limits>
#include <map>
#include <fstream>

#include <omp.h>

#include <Eigen/Core>
#include <boost/version.hpp>
#include <json.hpp>

#include "dpt/collective.hpp"
#include "dpt/control.hpp"
#include "dpt/errors.hpp"
#include "dpt/fits.hpp"
#include "dpt/observables.hpp"
#include "dpt/shots.hpp"
#include "dpt/table.hpp"
#include "dpt/thermal.hpp"

namespace dpt {

using json = nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";

template <class F>
auto stage(const std::string& name, F&& f) -> decltype(f()) {
  const auto tag = [&](const std::exception& e) { return "stage '" + name + "': " + e.what(); };
  try {
    return f();
  } catch (const CapacityError& e) {
    throw CapacityError(tag(e));
  } catch (const ConfigError& e) {
    throw ConfigError(tag(e));
  } catch (const NumericError& e) {
    throw NumericError(tag(e));
  } catch (const Error& e) {
    throw Error(tag(e));
  }
}

std::string out_path(const ExperimentConfig& cfg, const std::string& file) {
  std::filesystem::create_directories(cfg.output_dir);
  return (std::filesystem::path(cfg.output_dir) / file).string();
}

Table new_table(const ExperimentConfig& cfg, std::vector<std::string> columns) {
  Table t;
  t.meta["config_hash"] = config_hash(cfg);
  t.columns = std::move(columns);
  return t;
}

std::string save(const ExperimentConfig& cfg, const std::string& file, const Table& t) {
  const auto path = out_path(cfg, file);
  write_table(path, t);
  return path;
}

std::string save_json(const ExperimentConfig& cfg, const std::string& file, json j) {
  j["config_hash"] = config_hash(cfg);
  const auto path = out_path(cfg, file);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
  return path;
}

std::string ratio_tag(double r) { return format_double(r); }

HamiltonianSpec spec_for(const CouplingMatrix& c, double ratio, double gradient) {
  return HamiltonianSpec::from_ratio(c, ratio, gradient);
}

struct PooledShots {
  ShotRecord ideal;
  ShotRecord noisy;  // equals ideal when detection noise is off
};

// Shots from the last `pooled_times` grid points of a quench at `ratio`.
std::vector<std::pair<ShotRecord, ShotRecord>> late_time_shots(const ExperimentConfig& cfg, const CouplingMatrix& c,
                                                               double ratio) {
  const auto grid = time_grid(cfg);
  QuenchOptions q;
  q.evolve = evolve_options(cfg);
  const auto states = quench_states(spec_for(c, ratio, cfg.gradient_hz), grid, q);
  const Axis basis = parse_axis(cfg.basis);
  const DetectionNoise noise{cfg.p_flip, cfg.p_crosstalk};
  std::vector<std::pair<ShotRecord, ShotRecord>> out;
  for (std::size_t k = grid.size() - static_cast<std::size_t>(cfg.pooled_times); k < grid.size(); ++k) {
    const std::string label = "r=" + ratio_tag(ratio) + "/t=" + std::to_string(k);
    auto ideal = sample_shots(states[k], cfg.shots_per_time, basis, stage_seed(cfg, "shots/" + label), grid[k]);
    auto noisy = cfg.detection_noise ? apply_detection_noise(ideal, noise, stage_seed(cfg, "noise/" + label)) : ideal;
    out.emplace_back(std::move(ideal), std::move(noisy));
  }
  return out;
}

PooledShots pooled_shots(const ExperimentConfig& cfg, const CouplingMatrix& c, double ratio) {
  std::vector<ShotRecord> ideal, noisy;
  for (auto& [i, n] : late_time_shots(cfg, c, ratio)) {
    ideal.push_back(std::move(i));
    noisy.push_back(std::move(n));
  }
  return {pool_shots(ideal), pool_shots(noisy)};
}

json gamma_json(const std::optional<GammaFit>& g) {
  if (!g) return nullptr;
  return {{"shape", g->shape}, {"scale", g->scale}, {"mean", g->mean()}};
}

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

}  // namespace

// ---------------------------------------------------------------------------

CouplingMatrix synthesize_couplings_direct(int n, double J0, double alpha) { return power_law_couplings(n, J0, alpha); }

TrapConfig trap_config(const ExperimentConfig& cfg) {
  TrapConfig t;
  t.n_ions = cfg.n_ions;
  t.nu_axial = cfg.nu_axial_hz;
  t.nu_transverse = cfg.nu_transverse_hz;
  return t;
}

LaserConfig laser_config(const ExperimentConfig& cfg) {
  LaserConfig l;
  l.detuning_from_com = cfg.detuning_hz;
  l.recoil_freq = cfg.recoil_hz;
  l.coupling_sign = cfg.coupling_sign;
  return l;
}

CouplingMatrix build_couplings(const ExperimentConfig& cfg) {
  if (cfg.coupling_source == "power_law") {
    auto c = synthesize_couplings_direct(cfg.n_ions, cfg.j0_hz, cfg.alpha);
    if (cfg.coupling_sign < 0) c.J = -c.J;
    return c;
  }
  const auto geometry = solve_chain(trap_config(cfg));
  auto laser = laser_config(cfg);
  laser.rabi_freq = calibrate_rabi(geometry, laser, cfg.j0_hz);
  return ising_couplings(geometry, laser);
}

EvolveOptions evolve_options(const ExperimentConfig& cfg) {
  EvolveOptions o;
  o.tolerance = cfg.krylov_tolerance;
  if (cfg.method == "auto")
    o.method = cfg.n_ions <= 10 ? Method::ExactDiag : Method::Krylov;
  else
    o.method = parse_method(cfg.method);
  return o;
}

std::vector<double> time_grid(const ExperimentConfig& cfg) { return default_time_grid(cfg.time_points, cfg.tau_max); }

std::vector<double> scan_grid(const ExperimentConfig& cfg) { return arithmetic_grid(cfg.scan_min, cfg.scan_max, cfg.scan_step); }

// ---------------------------------------------------------------------------

std::vector<std::string> write_modes(const ExperimentConfig& cfg) {
  return stage("modes", [&] {
    const auto g = solve_chain(trap_config(cfg));
    const int n = g.n_ions();
    auto pos = new_table(cfg, {"ion", "position_um"});
    for (int i = 0; i < n; ++i) pos.rows.push_back({double(i + 1), g.positions[i] * 1e6});
    auto gaps = new_table(cfg, {"bond", "spacing_um"});
    for (int i = 0; i + 1 < n; ++i) gaps.rows.push_back({double(i + 1), (g.positions[i + 1] - g.positions[i]) * 1e6});
    std::vector<std::string> cols = {"mode", "frequency_hz"};
    for (int i = 1; i <= n; ++i) cols.push_back("b_" + std::to_string(i));
    auto modes = new_table(cfg, cols);
    for (int m = 0; m < n; ++m) {
      std::vector<double> row = {double(m + 1), g.mode_freqs[m]};
      for (int i = 0; i < n; ++i) row.push_back(g.mode_vectors(i, m));
      modes.rows.push_back(std::move(row));
    }
    return std::vector<std::string>{save(cfg, "positions.csv", pos), save(cfg, "spacings.csv", gaps),
                                    save(cfg, "modes.csv", modes)};
  });
}

std::vector<std::string> write_couplings(const ExperimentConfig& cfg) {
  return stage("couplings", [&] {
    const auto c = build_couplings(cfg);
    auto t = new_table(cfg, {"i", "j", "J_hz"});
    t.meta["J0_hz"] = format_double(c.J0);
    t.meta["kac"] = format_double(c.kac);
    t.meta["alpha_fit"] = c.n() >= 3 ? format_double(fit_power_law(c).alpha) : "nan";
    for (int i = 0; i < c.n(); ++i)
      for (int j = i + 1; j < c.n(); ++j) t.rows.push_back({double(i + 1), double(j + 1), c.J(i, j)});
    return std::vector<std::string>{save(cfg, "couplings.csv", t)};
  });
}

std::vector<std::string> write_bb1(const ExperimentConfig& cfg, const std::vector<double>& errors) {
  return stage("bb1", [&] {
    auto t = new_table(cfg, {"amplitude_error", "infidelity_bare", "infidelity_bb1"});
    for (double e : errors) t.rows.push_back({e, half_pi_infidelity(bare_half_pi(e)), half_pi_infidelity(bb1_half_pi(e))});
    return std::vector<std::string>{save(cfg, "bb1.csv", t)};
  });
}

std::vector<std::string> write_quench(const ExperimentConfig& cfg) {
  return stage("quench", [&] {
    if (cfg.ratios.empty()) throw ConfigError("no field ratios configured");
    const auto c = build_couplings(cfg);
    const auto grid = time_grid(cfg);
    QuenchOptions q;
    q.evolve = evolve_options(cfg);
    std::vector<std::string> files;
    for (double r : cfg.ratios) {
      const auto res = quench_run(spec_for(c, r, cfg.gradient_hz), grid, q);
      std::vector<std::string> cols = {"t_2pij0t", "mag_avg", "c2", "mag_cumavg", "c2_cumavg"};
      for (int i = 1; i <= c.n(); ++i) cols.push_back("mag_site_" + std::to_string(i));
      cols.push_back("alignment");
      auto t = new_table(cfg, cols);
      t.meta["bt_over_j0"] = format_double(r);
      t.meta["method"] = to_string(q.evolve.method);
      for (std::size_t k = 0; k < grid.size(); ++k) {
        std::vector<double> row = {res.tau[k], res.mag[k], res.c2[k], res.mag_cumavg[k], res.c2_cumavg[k]};
        for (int i = 0; i < c.n(); ++i) row.push_back(res.site_mag(static_cast<Eigen::Index>(k), i));
        row.push_back(-res.mag[k]);
        t.rows.push_back(std::move(row));
      }
      const auto name = cfg.ratios.size() == 1 ? std::string("quench.csv") : "quench_r" + ratio_tag(r) + ".csv";
      files.push_back(save(cfg, name, t));
    }
    return files;
  });
}

std::vector<std::string> write_scan(const ExperimentConfig& cfg) {
  return stage("scan", [&] {
    const auto c = build_couplings(cfg);
    ScanOptions o;
    o.evolve = evolve_options(cfg);
    o.window = parse_window(cfg.window);
    o.gradient = cfg.gradient_hz;
    const auto points = field_scan(c, scan_grid(cfg), time_grid(cfg), o);
    auto t = new_table(cfg, {"bt_over_j0", "c2_timeavg", "mag_timeavg_abs"});
    std::vector<double> x, y;
    for (const auto& p : points) {
      t.rows.push_back({p.ratio, p.c2_timeavg, p.mag_timeavg_abs});
      x.push_back(p.ratio);
      y.push_back(p.c2_timeavg);
    }
    json fit;
    try {
      const auto l = fit_lorentzian_dip(x, y);
      fit["lorentzian"] = {{"center", l.center}, {"center_error", l.center_error}, {"width", l.width},
                           {"depth", l.depth}, {"background", l.background}, {"slope", l.slope}, {"rss", l.rss}};
    } catch (const FitError& e) {
      fit["lorentzian"] = {{"error", e.what()}};
    }
    try {
      const auto b = fit_breakpoint(x, y, {}, {.seed = stage_seed(cfg, "scan/bootstrap")});
      fit["breakpoint"] = {{"location", b.breakpoint}, {"uncertainty", b.uncertainty}};
    } catch (const FitError& e) {
      fit["breakpoint"] = {{"error", e.what()}};
    }
    const auto minimum = interior_minimum(y);
    fit["interior_minimum"] = minimum ? json(x[*minimum]) : json(nullptr);
    return std::vector<std::string>{save(cfg, "scan.csv", t), save_json(cfg, "scan_fit.json", fit)};
  });
}

std::vector<std::string> write_thermal(const ExperimentConfig& cfg) {
  return stage("thermal", [&] {
    const auto c = build_couplings(cfg);
    const auto ratios = scan_grid(cfg);
    for (double r : ratios)
      if (!(r > 0.0)) throw ConfigError("thermal comparison needs B~z/J0 > 0 (r = 0 sits at the spectral edge)");
    ScanOptions o;
    o.evolve = evolve_options(cfg);
    o.window = parse_window(cfg.window);
    o.gradient = cfg.gradient_hz;
    const auto dyn = field_scan(c, ratios, time_grid(cfg), o);

    std::vector<ThermalResult> th(ratios.size());
    std::exception_ptr failure;
    const auto count = static_cast<long>(ratios.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (long p = 0; p < count; ++p) {
      try {
        th[static_cast<std::size_t>(p)] = thermal_comparison(spec_for(c, ratios[static_cast<std::size_t>(p)], 0.0));
      } catch (...) {
#pragma omp critical(dpt_thermal_failure)
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);

    auto t = new_table(cfg, {"bt_over_j0", "beta", "c2_thermal", "c2_dynamical"});
    for (std::size_t k = 0; k < ratios.size(); ++k) t.rows.push_back({ratios[k], th[k].beta, th[k].c2_thermal, dyn[k].c2_timeavg});
    return std::vector<std::string>{save(cfg, "thermal.csv", t)};
  });
}

std::vector<std::string> write_shot_files(const ExperimentConfig& cfg) {
  return stage("shots", [&] {
    const auto c = build_couplings(cfg);
    std::vector<std::string> files;
    for (double r : cfg.ratios) {
      const auto shots = late_time_shots(cfg, c, r);
      const auto grid = time_grid(cfg);
      std::size_t k = grid.size() - shots.size();
      for (const auto& [ideal, noisy] : shots) {
        const auto path = out_path(cfg, "shots_r" + ratio_tag(r) + "_t" + std::to_string(k++) + ".txt");
        std::ofstream out(path, std::ios::binary);
        write_shots(out, noisy);
        files.push_back(path);
      }
    }
    return files;
  });
}

std::vector<std::string> write_domain_scan(const ExperimentConfig& cfg) {
  return stage("domains", [&] {
    const auto c = build_couplings(cfg);
    const auto mode = parse_domain_mode(cfg.domain_mode);
    auto hist = new_table(cfg, {"bt_over_j0", "length", "count"});
    auto largest = new_table(cfg, {"bt_over_j0", "mean_largest", "sem_largest", "gamma_shape", "gamma_scale",
                                   "gamma_mean", "mean_largest_ideal", "sem_largest_ideal", "c2_shots", "c2_shots_se"});
    std::vector<double> x, y, w;
    for (double r : scan_grid(cfg)) {
      const auto pooled = pooled_shots(cfg, c, r);
      for (const auto& [len, count] : domain_histogram(pooled.noisy, mode)) hist.rows.push_back({r, double(len), double(count)});
      const auto st = largest_domain_stats(pooled.noisy, mode);
      const auto ideal = largest_domain_stats(pooled.ideal, mode);
      const auto c2 = estimate_c2(pooled.noisy);
      largest.rows.push_back({r, st.mean, st.sem, st.gamma ? st.gamma->shape : nan(), st.gamma ? st.gamma->scale : nan(),
                              st.gamma ? st.gamma->mean() : nan(), ideal.mean, ideal.sem, c2.value, c2.error});
      x.push_back(r);
      y.push_back(st.mean);
      w.push_back(st.sem > 0.0 ? 1.0 / (st.sem * st.sem) : 1.0);
    }
    json fit;
    try {
      const auto b = fit_breakpoint(x, y, w, {.seed = stage_seed(cfg, "domains/bootstrap")});
      fit["breakpoint"] = {{"location", b.breakpoint}, {"uncertainty", b.uncertainty}, {"slope_left", b.slope_left},
                           {"slope_right", b.slope_right}};
    } catch (const FitError& e) {
      fit["breakpoint"] = {{"error", e.what()}};
    }
    return std::vector<std::string>{save(cfg, "domains.csv", hist), save(cfg, "largest.csv", largest),
                                    save_json(cfg, "largest_fit.json", fit)};
  });
}

std::vector<std::string> write_largest_domains(const ExperimentConfig& cfg) {
  return stage("largest", [&] {
    const auto c = build_couplings(cfg);
    const auto mode = parse_domain_mode(cfg.domain_mode);
    auto hist = new_table(cfg, {"bt_over_j0", "largest", "count"});
    auto gamma = new_table(cfg, {"bt_over_j0", "n_shots", "mean_largest", "sem_largest", "gamma_shape", "gamma_scale", "gamma_mean"});
    for (double r : cfg.ratios) {
      const auto pooled = pooled_shots(cfg, c, r);
      const auto st = largest_domain_stats(pooled.noisy, mode);
      std::map<int, long> counts;
      for (int v : st.largest_per_shot) ++counts[v];
      for (const auto& [v, n] : counts) hist.rows.push_back({r, double(v), double(n)});
      gamma.rows.push_back({r, double(st.largest_per_shot.size()), st.mean, st.sem, st.gamma ? st.gamma->shape : nan(),
                            st.gamma ? st.gamma->scale : nan(), st.gamma ? st.gamma->mean() : nan()});
    }
    return std::vector<std::string>{save(cfg, "largest_hist.csv", hist), save(cfg, "gamma.csv", gamma)};
  });
}

std::vector<std::string> write_domains_from_files(const ExperimentConfig& cfg, const std::vector<std::string>& inputs) {
  return stage("domains", [&] {
    if (inputs.empty()) throw ConfigError("no shot files given");
    std::vector<ShotRecord> records;
    for (const auto& path : inputs) {
      std::ifstream in(path);
      if (!in) throw ConfigError("cannot open shot file '" + path + "'");
      records.push_back(read_shots(in));
    }
    const auto pooled = pool_shots(records);
    const auto mode = parse_domain_mode(cfg.domain_mode);
    auto hist = new_table(cfg, {"length", "count"});
    for (const auto& [len, count] : domain_histogram(pooled, mode)) hist.rows.push_back({double(len), double(count)});
    const auto st = largest_domain_stats(pooled, mode);
    auto largest = new_table(cfg, {"shot", "largest"});
    for (std::size_t k = 0; k < st.largest_per_shot.size(); ++k)
      largest.rows.push_back({double(k + 1), double(st.largest_per_shot[k])});
    json summary = {{"n_shots", pooled.size()}, {"n_qubits", pooled.n_qubits}, {"mode", cfg.domain_mode},
                    {"mean_largest", st.mean}, {"sem_largest", st.sem}, {"gamma", gamma_json(st.gamma)}};
    if (pooled.size() >= 2) {
      const auto c2 = estimate_c2(pooled);
      summary["c2"] = {{"value", c2.value}, {"stderr", c2.error}};
    }
    return std::vector<std::string>{save(cfg, "domains.csv", hist), save(cfg, "largest.csv", largest),
                                    save_json(cfg, "domains_fit.json", summary)};
  });
}

std::vector<std::string> write_collective(const ExperimentConfig& cfg, std::vector<double> cutoffs) {
  return stage("collective", [&] {
    const auto rs = arithmetic_grid(cfg.collective_r_min, cfg.collective_r_max, cfg.collective_r_step);
    auto t = new_table(cfg, {"r", "c2_longtime", "n_label"});
    const double inf = std::numeric_limits<double>::infinity();
    for (const auto& p : dip_scan(std::nullopt, rs)) t.rows.push_back({p.r, p.c2, inf});
    for (int n : cfg.dicke_sizes)
      for (const auto& p : dip_scan(n, rs)) t.rows.push_back({p.r, p.c2, double(n)});
    std::vector<std::string> files = {save(cfg, "dip.csv", t)};
    if (!cutoffs.empty()) {
      auto ct = new_table(cfg, {"r", "c2_longtime", "cutoff"});
      for (double eps : cutoffs)
        for (const auto& p : dip_scan(std::nullopt, rs, eps)) ct.rows.push_back({p.r, p.c2, eps});
      files.push_back(save(cfg, "dip_cutoff.csv", ct));
    }
    return files;
  });
}

// ---------------------------------------------------------------------------

std::vector<std::string> run_experiment(const ExperimentConfig& cfg, int figure) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::string> files;
  const auto add = [&](std::vector<std::string> more) { files.insert(files.end(), more.begin(), more.end()); };
  switch (figure) {
    case 2: add(write_quench(cfg)); break;
    case 3:
      add(write_scan(cfg));
      if (cfg.n_ions <= 12) add(write_thermal(cfg));
      break;
    case 4: add(write_domain_scan(cfg)); break;
    case 5:
      add(write_largest_domains(cfg));
      add(write_shot_files(cfg));
      break;
    case 6: add(write_collective(cfg, {0.1, 0.01, 0.001})); break;
    default: throw ConfigError("unknown figure " + std::to_string(figure) + " (expected 2-6)");
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  json manifest;
  manifest["figure"] = figure;
  manifest["config"] = to_key_values(cfg);
  manifest["config_hash"] = config_hash(cfg);
  json names = json::array();
  for (const auto& f : files) names.push_back(std::filesystem::path(f).filename().string());
  manifest["files"] = names;
  manifest["versions"] = {{"dpt", kVersion},
                          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                        std::to_string(EIGEN_MINOR_VERSION)},
                          {"boost", BOOST_LIB_VERSION}};
  manifest["wall_time_s"] = wall;
  manifest["threads"] = omp_get_max_threads();
  const auto path = out_path(cfg, "manifest.json");
  std::ofstream out(path, std::ios::binary);
  out << manifest.dump(2) << '\n';
  files.push_back(path);
  return files;
}

ManifestInfo read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open manifest '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("manifest '" + path + "' is not valid JSON: " + e.what());
  }
  if (!j.contains("config") || !j["config"].is_object()) throw ConfigError("manifest has no config object");
  std::map<std::string, std::string> kv;
  for (const auto& [key, value] : j["config"].items()) kv[key] = value.get<std::string>();
  ManifestInfo info;
  info.config = apply_key_values(ExperimentConfig{}, kv);
  info.figure = j.value("figure", 0);
  return info;
}

}  // namespace dpt
