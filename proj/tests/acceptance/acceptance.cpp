// Acceptance checks 1-9. One line per criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "random_dag.hpp"
#include "spillover/cli.hpp"
#include "spillover/pair_csv.hpp"
#include "spillover/path_algebra.hpp"
#include "spillover/report.hpp"
#include "spillover/simulator.hpp"

using namespace spillover;

namespace {

int failures = 0;

void verdict(int criterion, bool pass, const std::string& detail) {
  if (!pass) ++failures;
  fmt::print("criterion {} {}: {}\n", criterion, pass ? "PASS" : "FAIL", detail);
  std::cout.flush();
}

const Figure4Row& row_of(const std::vector<Figure4Row>& rows, const std::string& preset) {
  for (const auto& r : rows)
    if (r.preset == preset) return r;
  throw std::runtime_error("missing preset " + preset);
}

// Single-sample 10^7-pair population SC of the threshold DGP, computed
// before the build by tests/oracles/threshold_dgp_oracle.py.
const std::map<std::string, std::pair<double, double>> kOracle{
    {"fig3a", {0.431246, 0.0009}}, {"fig3b", {1.315720, 0.0009}}, {"fig3c", {-0.465615, 0.0009}}};

std::string capture(const RunManifest& m, int& code) {
  std::ostringstream out, err;
  code = run(m, out, err);
  if (code != 0) std::cerr << err.str();
  return out.str();
}

// Signed multiset of factors, e.g. "-chi*psi" -> {-1, [chi, psi]}.
std::pair<int, std::multiset<std::string>> factors(std::string product) {
  int sign = 1;
  if (!product.empty() && product[0] == '-') {
    sign = -1;
    product.erase(0, 1);
  }
  std::multiset<std::string> out;
  std::istringstream in(product);
  for (std::string f; std::getline(in, f, '*');) out.insert(f);
  return {sign, out};
}

void criteria_1_2_3(const std::vector<Figure4Row>& rows) {
  {
    bool ok = true;
    std::string detail;
    for (const char* p : {"fig1a", "fig1b", "fig1c"}) {
      const auto& s = row_of(rows, p).summary;
      ok = ok && s.mean_sc >= 0.49 && s.mean_sc <= 0.51 && std::abs(s.percentile_low - 0.42) <= 0.02 &&
           std::abs(s.percentile_high - 0.58) <= 0.02;
      detail += fmt::format("{} mean {:.4f} interval ({:.3f}, {:.3f}); ", p, s.mean_sc, s.percentile_low,
                            s.percentile_high);
    }
    verdict(1, ok, detail + "need mean in [0.49, 0.51], interval within 0.02 of (0.42, 0.58)");
  }
  {
    bool ok = true;
    std::string detail;
    for (const char* p : {"fig2a", "fig2b", "fig2c"}) {
      const auto& s = row_of(rows, p).summary;
      ok = ok && s.mean_sc >= 0.19 && s.mean_sc <= 0.21;
      detail += fmt::format("{} mean {:.4f} interval ({:.3f}, {:.3f}); ", p, s.mean_sc, s.percentile_low,
                            s.percentile_high);
    }
    verdict(2, ok, detail + "need mean in [0.19, 0.21]");
  }
  {
    bool ok = true;
    std::string detail;
    for (const char* p : {"fig3a", "fig3b", "fig3c"}) {
      const auto& s = row_of(rows, p).summary;
      const auto [reference, reference_se] = kOracle.at(p);
      const double mc_se = s.empirical_sd / std::sqrt(static_cast<double>(s.n_reps));
      const double z = (s.mean_sc - reference) / std::hypot(mc_se, reference_se);
      ok = ok && std::abs(s.mean_sc - 0.5) > 0.05 && std::abs(z) < 4.0;
      detail += fmt::format("{} mean {:.4f} vs oracle {:.4f} (z {:+.2f}); ", p, s.mean_sc, reference, z);
    }
    verdict(3, ok, detail + "need |mean - 0.5| > 0.05 and agreement with the oracle within 4 SE");
  }
}

void criterion_7(const std::vector<Figure4Row>& rows) {
  {
    bool ok = true;
    std::string detail;
    for (const char* p : {"fig1a", "fig1b", "fig1c", "fig2a", "fig2b", "fig2c"}) {
      const auto& s = row_of(rows, p).summary;
      const double ratio = s.mean_reported_se / s.empirical_sd;
      ok = ok && std::abs(ratio - 1.0) <= 0.10;
      detail += fmt::format("{} se/sd {:.3f}", p, ratio);
      if (p[3] == '1') {
        ok = ok && s.coverage >= 0.93 && s.coverage <= 0.97;
        detail += fmt::format(" coverage {:.3f}", s.coverage);
      }
      detail += "; ";
    }
    verdict(7, ok, detail + "need se/sd within 10% and fig1 coverage in [0.93, 0.97]");
  }
}

void criterion_4() {
  bool ok = true;
  double worst = 0.0;
  for (const char* p : {"fig1a", "fig1b", "fig1c", "fig2a", "fig2b", "fig2c"}) {
    const auto v = symbolic_check(p, 100, 0x5eed);
    ok = ok && v.passed();
    for (const auto& c : v.checks) worst = std::max(worst, c.max_abs_error);
  }
  verdict(4, ok && worst < 1e-9,
          fmt::format("100 draws per preset, largest |population - closed form| {:.2e} (limit 1e-9)", worst));
}

void criterion_5() {
  double worst_preset = 0.0, worst_random = 0.0;
  for (const auto& p : presets()) {
    const auto model = sibling_model(p.parameters);
    worst_preset = std::max(worst_preset, (implied_covariance_matrix(model).covariance -
                                           implied_covariance_treks(model).covariance)
                                              .cwiseAbs()
                                              .maxCoeff());
  }
  std::mt19937_64 gen(20107);
  for (int k = 0; k < 1000; ++k) {
    const auto model = build_model(testing::random_dag(gen, 3, 6));
    worst_random = std::max(worst_random, (implied_covariance_matrix(model).covariance -
                                           implied_covariance_treks(model).covariance)
                                              .cwiseAbs()
                                              .maxCoeff());
  }
  verdict(5, worst_preset <= 1e-12 && worst_random <= 1e-12,
          fmt::format("max entrywise difference {:.2e} on 9 presets, {:.2e} on 1000 random DAGs (limit 1e-12)",
                      worst_preset, worst_random));
}

void criterion_6() {
  RunManifest m;
  m.subcommand = Subcommand::paths;
  m.model = "fig1a";
  m.from = "T1";
  m.to = "D";
  m.given = {"T2"};
  m.format = "json";
  int code = 0;
  const auto doc = Json::parse(capture(m, code));

  struct Expected {
    std::string path, product, status;
  };
  // T1 -> Y1 -> D passes the -1 link of D = Y2 - Y1.
  const std::vector<Expected> expected{
      {"T1 <- U -> T2 -> Y2 -> D", "delta*chi*gamma", "closed-by-conditioning"},
      {"T1 <- U -> Y1 -> D", "-psi*chi", "open"},
      {"T1 <- U -> Y2 -> D", "psi*chi", "open"},
      {"T1 -> Y1 -> D", "-delta", "open"},
      {"T1 -> Y2 -> D", "theta", "open"}};
  bool ok = code == 0 && doc.size() == expected.size();
  std::string listing;
  for (std::size_t i = 0; ok && i < expected.size(); ++i) {
    const auto& got = doc[i];
    ok = got["path"] == expected[i].path && got["status"] == expected[i].status &&
         factors(got["symbolic_product"].get<std::string>()) == factors(expected[i].product);
    listing += fmt::format("{} [{}] {}; ", got["path"].get<std::string>(), got["symbolic_product"].get<std::string>(),
                           got["status"].get<std::string>());
  }
  // the cancelling pair
  if (ok) ok = doc[1]["coefficient_product"].get<double>() == -doc[2]["coefficient_product"].get<double>();
  verdict(6, ok, listing + "T1 -> Y1 -> D carries -delta");
}

void criterion_8() {
  SimulationConfig config = preset_config("fig1a", ExposureMode::linear_gaussian);
  config.parameters.theta = -2.11;
  config.parameters.delta = -2.49;
  config.n_obs = 20010;
  config.n_reps = 200;
  config.master_seed = 20107;
  const double theta = config.parameters.theta, delta = config.parameters.delta;

  // one synthetic dataset through the CSV -> estimate -> JSON path
  const auto dir = std::filesystem::temp_directory_path() / "spillover_acceptance";
  std::filesystem::create_directories(dir);
  const auto csv = (dir / "pairs.csv").string();
  const auto sample = simulate_sample(config, 0);
  save_pair_csv(sample, csv);
  RunManifest m;
  m.subcommand = Subcommand::estimate;
  m.data = csv;
  m.format = "json";
  int code = 0;
  const auto doc = Json::parse(capture(m, code));
  const auto parsed = spillover_report_from_json(doc["reports"][0]);
  const auto direct = spillover_estimate(sample);
  const bool round_trip = code == 0 && std::abs(parsed.sc.estimate - direct.sc.estimate) <= 1e-12 &&
                          std::abs(parsed.b2.estimate - direct.b2.estimate) <= 1e-12 &&
                          std::abs(parsed.sc.se - direct.sc.se) <= 1e-12 && parsed.n == 20010;
  const double z_theta_1 = (parsed.sc.estimate - theta) / parsed.sc.se;
  const double z_delta_1 = (parsed.b2.estimate - delta) / parsed.b2.se;

  // Monte Carlo recovery
  const auto s = monte_carlo(config);
  const double z_theta = (s.mean_sc - theta) / (s.empirical_sd / std::sqrt(200.0));
  const double z_delta = (s.mean_b2 - delta) / (s.sd_b2 / std::sqrt(200.0));

  const bool ok = round_trip && std::abs(z_theta_1) < 4 && std::abs(z_delta_1) < 4 && std::abs(z_theta) < 4 &&
                  std::abs(z_delta) < 4;
  verdict(8, ok,
          fmt::format("round trip {}; one sample SC {:.3f} ({:.3f}, {:.3f}) z {:+.2f}, b2 {:.3f} z {:+.2f}; "
                      "200 reps mean SC {:.4f} z {:+.2f}, mean b2 {:.4f} z {:+.2f} (limit |z| < 4)",
                      round_trip ? "exact" : "MISMATCH", parsed.sc.estimate, parsed.sc.ci_low, parsed.sc.ci_high,
                      z_theta_1, parsed.b2.estimate, z_delta_1, s.mean_sc, z_theta, s.mean_b2, z_delta));
}

void criterion_9() {
  std::vector<RunManifest> manifests;
  for (const char* format : {"csv", "json"}) {
    RunManifest f;
    f.subcommand = Subcommand::figure4;
    f.reps = 1000;
    f.n = 5000;
    f.seed = 20107;
    f.format = format;
    manifests.push_back(f);
    RunManifest s;
    s.subcommand = Subcommand::simulate;
    s.model = "fig2c";
    s.mode = "linear-gaussian";
    s.reps = 300;
    s.n = 2000;
    s.seed = 99;
    s.format = format;
    manifests.push_back(s);
  }
  bool ok = true;
  std::size_t bytes = 0;
  for (const auto& m : manifests) {
    int code1 = 0, code8 = 0;
    setenv("SPILLOVER_LAB_THREADS", "1", 1);
    const auto one = capture(m, code1);
    setenv("SPILLOVER_LAB_THREADS", "8", 1);
    const auto eight = capture(m, code8);
    ok = ok && code1 == 0 && code8 == 0 && one == eight && !one.empty();
    bytes += one.size();
  }
  unsetenv("SPILLOVER_LAB_THREADS");
  verdict(9, ok, fmt::format("figure4 and simulate, csv and json, {} bytes compared between 1 and 8 threads", bytes));
}

} // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  Figure4Options options;
  options.n_reps = 1000;
  options.n_obs = 5000;
  options.master_seed = 20107;
  const auto rows = figure4_table(options);
  const double figure4_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  criteria_1_2_3(rows);
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7(rows);
  criterion_8();
  criterion_9();

  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  fmt::print("figure4 (9 x 1000 x 5000) took {:.1f} s; all checks {:.1f} s\n", figure4_seconds, total);
  fmt::print("{} of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
