#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "spillover/error.hpp"
#include "spillover/pair_csv.hpp"
#include "spillover/path_algebra.hpp"
#include "spillover/simulator.hpp"

using namespace spillover;

namespace {

double mean_of(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

} // namespace

TEST_CASE("samples follow the threshold rules") {
  auto config = preset_config("fig1a");
  config.n_obs = 20000;
  config.master_seed = 42;
  const auto sample = simulate_sample(config, 0);
  REQUIRE(sample.size() == 20000);
  CHECK(sample.rows.front().family_id == "1");
  std::vector<double> t1, t2;
  for (const auto& r : sample.rows) {
    CHECK((r.t1 == 0.0 || r.t1 == 1.0));
    CHECK((r.t2 == 0.0 || r.t2 == 1.0));
    t1.push_back(r.t1);
    t2.push_back(r.t2);
  }
  // P(2U > 0.5) = P(Z > 0.25), P(3U > 0.2) = P(Z > 0.0667)
  CHECK(mean_of(t1) == doctest::Approx(0.4013).epsilon(0.03));
  CHECK(mean_of(t2) == doctest::Approx(0.4734).epsilon(0.03));
  const double m1 = mean_of(t1), m2 = mean_of(t2);
  double cov = 0;
  for (std::size_t i = 0; i < t1.size(); ++i) cov += (t1[i] - m1) * (t2[i] - m2);
  CHECK(cov / t1.size() > 0.15); // shared U
}

TEST_CASE("replicates are a pure function of seed and index") {
  auto config = preset_config("fig2b");
  config.n_obs = 300;
  config.master_seed = 7;
  std::ostringstream a, b, c;
  write_pair_csv(simulate_sample(config, 3), a);
  write_pair_csv(simulate_sample(config, 3), b);
  write_pair_csv(simulate_sample(config, 4), c);
  CHECK(a.str() == b.str());
  CHECK(a.str() != c.str());

  config.n_reps = 40;
  config.threads = 1;
  const auto one = run_replicates(config);
  config.threads = 8;
  const auto eight = run_replicates(config);
  REQUIRE(one.size() == eight.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one[i].replicate == i);
    CHECK(one[i].sc.estimate == eight[i].sc.estimate);
    CHECK(one[i].sc.se == eight[i].sc.se);
  }
}

TEST_CASE("without outcome noise the one-sided fit is exact") {
  auto config = preset_config("fig1a");
  config.outcome_noise_variance = 0.0;
  config.n_obs = 500;
  config.n_reps = 5;
  config.master_seed = 1;
  const auto s = monte_carlo(config);
  CHECK(s.mean_sc == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(s.empirical_sd < 1e-10);
  CHECK(s.mean_reported_se < 1e-10);
}

TEST_CASE("doubling n shrinks the spread by about root two") {
  auto config = preset_config("fig1a");
  config.n_reps = 300;
  config.master_seed = 99;
  config.n_obs = 1000;
  const double sd_small = monte_carlo(config).empirical_sd;
  config.n_obs = 2000;
  const double sd_large = monte_carlo(config).empirical_sd;
  CHECK(sd_small / sd_large == doctest::Approx(std::sqrt(2.0)).epsilon(0.15));
}

TEST_CASE("linear mode recovers the population regression") {
  for (const char* name : {"fig1c", "fig2a", "fig3c"}) {
    CAPTURE(name);
    auto config = preset_config(name, ExposureMode::linear_gaussian);
    config.n_obs = 4000;
    config.n_reps = 100;
    config.master_seed = 3;
    const auto s = monte_carlo(config);
    const auto pop = population_partial_regression(simulation_model(config));
    CHECK(std::abs(s.mean_b1 - pop.b1) < 4.0 * s.sd_b1 / std::sqrt(100.0));
    CHECK(std::abs(s.mean_b2 - pop.b2) < 4.0 * s.sd_b2 / std::sqrt(100.0));
  }
}

TEST_CASE("200-replicate smoke run of the one- and two-sided presets") {
  Figure4Options options;
  options.n_reps = 200;
  options.n_obs = 5000;
  options.master_seed = 20107;
  options.threads = 1;
  const auto rows = figure4_table(options);
  REQUIRE(rows.size() == 9);
  for (const auto& row : rows) {
    CAPTURE(row.preset);
    if (row.family == PresetFamily::one_sided) CHECK(std::abs(row.summary.mean_sc - 0.5) < 0.02);
    if (row.family == PresetFamily::two_sided) CHECK(std::abs(row.summary.mean_sc - 0.2) < 0.02);
    if (row.family == PresetFamily::outcome_spillover) CHECK(std::isnan(row.identified_value));
    CHECK(row.summary.percentile_low < row.summary.mean_sc);
    CHECK(row.summary.mean_sc < row.summary.percentile_high);
  }
}

TEST_CASE("configuration errors") {
  auto config = preset_config("fig1a");
  config.n_reps = 1;
  CHECK_THROWS_AS(run_replicates(config), ConfigError);
  config.n_reps = 10;
  config.parameters.eta = 0.2;
  config.parameters.lambda = 0.2;
  CHECK_THROWS_AS(simulation_model(config), ConfigError);
  CHECK_THROWS_AS(exposure_mode_from_string("probit"), ConfigError);

  // constant exposures cannot be separated from the intercept
  auto flat = preset_config("fig1a");
  flat.thresholds["T1"] = 1e9;
  flat.n_obs = 100;
  flat.n_reps = 3;
  CHECK_THROWS_AS(run_replicates(flat), RankDeficiencyError);
}

TEST_CASE("type-7 quantiles") {
  CHECK(sample_quantile({3, 1, 2, 4}, 0.5) == doctest::Approx(2.5));
  CHECK(sample_quantile({1, 2, 3, 4, 5}, 0.25) == doctest::Approx(2.0));
  CHECK(sample_quantile({10, 20}, 0.975) == doctest::Approx(19.75));
}
