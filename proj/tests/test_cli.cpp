#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "dpt/config.hpp"
#include "dpt/errors.hpp"
#include "dpt/experiment.hpp"
#include "dpt/observables.hpp"
#include "dpt/table.hpp"

using namespace dpt;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("dpt_test_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(DPT_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

ExperimentConfig small_config(const fs::path& out) {
  ExperimentConfig cfg;
  cfg.n_ions = 8;
  cfg.ratios = {0.8};
  cfg.output_dir = out.string();
  return cfg;
}

}  // namespace

TEST_CASE("config serialization round-trips") {
  ExperimentConfig cfg;
  cfg.n_ions = 9;
  cfg.alpha = 1.0 / 3.0;
  cfg.ratios = {0.1, 0.7, 1.35};
  cfg.dicke_sizes = {8, 32};
  cfg.method = "krylov";
  cfg.detection_noise = false;
  std::istringstream in(serialize(cfg));
  const auto back = apply_key_values(ExperimentConfig{}, parse_key_values(in));
  CHECK(serialize(back) == serialize(cfg));
  CHECK(back.alpha == cfg.alpha);
  CHECK(back.ratios == cfg.ratios);
  CHECK(config_hash(back) == config_hash(cfg));
}

TEST_CASE("config hash") {
  ExperimentConfig a;
  CHECK(config_hash(a) == config_hash(ExperimentConfig{}));
  CHECK(config_hash(a).size() == 16);
  ExperimentConfig b = a;
  b.output_dir = "/somewhere/else";
  CHECK(config_hash(b) == config_hash(a));
  b.alpha = std::nextafter(a.alpha, 2.0);
  CHECK(config_hash(b) != config_hash(a));
  ExperimentConfig c = a;
  c.seed += 1;
  CHECK(config_hash(c) != config_hash(a));
}

TEST_CASE("config parsing errors") {
  std::istringstream unknown("n_ions = 4\nnot_a_key = 3\n");
  CHECK_THROWS_AS(apply_key_values(ExperimentConfig{}, parse_key_values(unknown)), ConfigError);
  std::istringstream bad("n_ions = four\n");
  CHECK_THROWS_AS(apply_key_values(ExperimentConfig{}, parse_key_values(bad)), ConfigError);
  std::istringstream comments("# a comment\n  alpha = 1.5  # trailing\n\n");
  CHECK(apply_key_values(ExperimentConfig{}, parse_key_values(comments)).alpha == 1.5);
  ExperimentConfig neg;
  neg.n_ions = 0;
  CHECK_THROWS_AS(neg.validate(), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/dpt.cfg"), ConfigError);
}

TEST_CASE("DPT_SEED overrides the master seed") {
  ExperimentConfig cfg;
  ::setenv("DPT_SEED", "12345", 1);
  apply_environment(cfg);
  ::unsetenv("DPT_SEED");
  CHECK(cfg.seed == 12345u);
  ExperimentConfig untouched;
  apply_environment(untouched);
  CHECK(untouched.seed == ExperimentConfig{}.seed);
  CHECK(stage_seed(cfg, "a") != stage_seed(cfg, "b"));
  CHECK(stage_seed(cfg, "a") == stage_seed(cfg, "a"));
}

TEST_CASE("tables round-trip bit-exactly") {
  const auto dir = scratch("table");
  Table t;
  t.meta["config_hash"] = "0123456789abcdef";
  t.columns = {"a", "b"};
  const double inf = std::numeric_limits<double>::infinity();
  t.rows = {{0.1, 1.0 / 3.0}, {1e-300, -2.5e300}, {std::nextafter(1.0, 2.0), inf}, {-0.0, std::nan("")}};
  write_table((dir / "t.csv").string(), t);
  const auto back = read_table((dir / "t.csv").string());
  CHECK(back.meta == t.meta);
  CHECK(back.columns == t.columns);
  REQUIRE(back.rows.size() == t.rows.size());
  for (std::size_t k = 0; k + 1 < t.rows.size(); ++k) CHECK(back.rows[k] == t.rows[k]);
  CHECK(std::signbit(back.rows[3][0]));
  CHECK(std::isnan(back.rows[3][1]));
  CHECK_THROWS_AS(back.column("missing"), ConfigError);
}

TEST_CASE("direct coupling synthesis") {
  const auto c = synthesize_couplings_direct(3, 1.0, 1.0);
  CHECK(c.J(0, 1) == 1.0);
  CHECK(c.J(1, 2) == 1.0);
  CHECK(c.J(0, 2) == 0.5);
  const auto nn = synthesize_couplings_direct(5, 2.0, std::numeric_limits<double>::infinity());
  CHECK(nn.J(0, 1) == 2.0);
  CHECK(nn.J(0, 2) == 0.0);
  const auto flat = synthesize_couplings_direct(4, 3.0, 0.0);
  CHECK(flat.J(0, 3) == 3.0);
  CHECK(flat.J(1, 1) == 0.0);
}

TEST_CASE("zero-field quench stays polarized and reruns byte-identically") {
  const auto dir = scratch("fig2");
  ExperimentConfig cfg;
  cfg.n_ions = 12;
  cfg.ratios = {0.0};
  cfg.output_dir = (dir / "a").string();
  run_experiment(cfg, 2);
  const auto t = read_table((dir / "a" / "quench.csv").string());
  for (double m : t.values("mag_avg")) CHECK(std::abs(m + 1.0) < 1e-12);
  for (double c : t.values("c2")) CHECK(std::abs(c - 1.0) < 1e-12);
  CHECK(t.meta.at("config_hash") == config_hash(cfg));

  cfg.output_dir = (dir / "b").string();
  run_experiment(cfg, 2);
  CHECK(slurp(dir / "a" / "quench.csv") == slurp(dir / "b" / "quench.csv"));
}

TEST_CASE("manifest rerun reproduces the bundle") {
  const auto dir = scratch("manifest");
  auto cfg = small_config(dir / "first");
  cfg.ratios = {0.6, 1.6};
  const auto files = run_experiment(cfg, 2);
  CHECK(files.size() == 3);
  auto info = read_manifest((dir / "first" / "manifest.json").string());
  CHECK(info.figure == 2);
  CHECK(config_hash(info.config) == config_hash(cfg));
  info.config.output_dir = (dir / "second").string();
  run_experiment(info.config, info.figure);
  for (const char* name : {"quench_r0.6.csv", "quench_r1.6.csv"}) {
    CAPTURE(name);
    CHECK(slurp(dir / "first" / name) == slurp(dir / "second" / name));
  }
  std::ofstream(dir / "broken.json") << "{ not json";
  CHECK_THROWS_AS(read_manifest((dir / "broken.json").string()), ConfigError);
}

TEST_CASE("derived quench columns recompute from the primary ones") {
  const auto dir = scratch("derived");
  const auto cfg = small_config(dir);
  write_quench(cfg);
  const auto t = read_table((dir / "quench.csv").string());
  const auto tau = t.values("t_2pij0t");
  const auto mag = t.values("mag_avg");
  const auto cum = cumulative_average(mag, tau);
  const auto c2cum = cumulative_average(t.values("c2"), tau);
  const auto stored = t.values("mag_cumavg");
  const auto stored_c2 = t.values("c2_cumavg");
  const auto align = t.values("alignment");
  for (std::size_t k = 0; k < tau.size(); ++k) {
    CHECK(std::abs(stored[k] - cum[k]) < 1e-12);
    CHECK(std::abs(stored_c2[k] - c2cum[k]) < 1e-12);
    CHECK(align[k] == -mag[k]);
    double site_mean = 0.0;
    for (int i = 1; i <= cfg.n_ions; ++i) site_mean += t.rows[k][t.column("mag_site_" + std::to_string(i))];
    CHECK(std::abs(site_mean / cfg.n_ions - mag[k]) < 1e-12);
  }
  CHECK(t.columns.back() == "alignment");
}

TEST_CASE("collective recipe: N = inf dip sits at r = 1") {
  const auto dir = scratch("fig6");
  ExperimentConfig cfg;
  cfg.dicke_sizes = {16, 64};
  cfg.output_dir = dir.string();
  run_experiment(cfg, 6);
  const auto t = read_table((dir / "dip.csv").string());
  std::vector<double> r, c2;
  for (const auto& row : t.rows)
    if (std::isinf(row[t.column("n_label")])) {
      r.push_back(row[t.column("r")]);
      c2.push_back(row[t.column("c2_longtime")]);
    }
  REQUIRE(r.size() == 41);
  const auto k = std::min_element(c2.begin(), c2.end()) - c2.begin();
  CHECK(r[static_cast<std::size_t>(k)] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fs::exists(dir / "dip_cutoff.csv"));
}

TEST_CASE("command-line exit codes") {
  const auto dir = scratch("exit");
  const std::string out = " --out " + dir.string();
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("") == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("bb1" + out) == 0);
  CHECK(fs::exists(dir / "bb1.csv"));
  CHECK(run_cli("couplings --n 6 --alpha 1.2" + out) == 0);
  CHECK(run_cli("quench --n 0" + out) == 2);
  CHECK(run_cli("quench --n 6 --method lanczos" + out) == 2);
  CHECK(run_cli("reproduce --figure 9" + out) == 2);
  CHECK(run_cli("modes --n 20 --nu-transverse 480000" + out) == 3);
  CHECK(run_cli("domains /nonexistent/shots.txt" + out) == 2);

  CHECK(run_cli("quench --n 6 --bt-over-j0 0.5 --steps 5 --write-shots --pooled 2 --shots 20" + out) == 0);
  CHECK(run_cli("domains " + (dir / "shots_r0.5_t3.txt").string() + " " + (dir / "shots_r0.5_t4.txt").string() + out) == 0);
  CHECK(fs::exists(dir / "domains_fit.json"));
}
