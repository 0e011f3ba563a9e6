#pragma once

// Monte Carlo study of the gain-score spillover coefficient under the
// sibling data-generating processes.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spillover/estimator.hpp"
#include "spillover/sem_graph.hpp"

namespace spillover {

enum class ExposureMode { binary_threshold, linear_gaussian };

std::string_view to_string(ExposureMode mode);
ExposureMode exposure_mode_from_string(std::string_view text);

struct SimulationConfig {
  /// Preset name, or "custom" together with custom_model.
  std::string model_id = "fig1a";
  std::optional<ModelSpec> custom_model;
  SiblingParameters parameters;

  int n_obs = 5000;
  int n_reps = 1000;
  std::uint64_t master_seed = 0;
  ExposureMode exposure_mode = ExposureMode::binary_threshold;

  /// Variance of the outcome disturbances; 0 suppresses them.
  double outcome_noise_variance = 1.0;
  /// Exposure cut points in binary-threshold mode (strict ">").
  std::map<std::string, double> thresholds{{"T1", 0.5}, {"T2", 0.2}};
  double confidence_level = 0.95;
  /// Value the per-replicate intervals are checked against; defaults to
  /// the T1 -> Y2 coefficient.
  std::optional<double> coverage_target;
  /// 0 = SPILLOVER_LAB_THREADS, else hardware concurrency.
  unsigned threads = 0;
};

/// Preset defaults for one preset.
SimulationConfig preset_config(std::string_view preset, ExposureMode mode = ExposureMode::binary_threshold);

/// The structural model a configuration simulates from. Exposure noise is
/// zero in binary-threshold mode and one in linear-gaussian mode.
/// Throws ConfigError for simultaneity violations or bad settings.
PathModel simulation_model(const SimulationConfig& config);

/// Draws one sample. Replicate r of a configuration is a pure function of
/// (master_seed, r).
PairDataset simulate_sample(const SimulationConfig& config, std::uint64_t replicate_index);

struct ReplicateResult {
  std::uint64_t replicate = 0;
  ContrastEstimate sc;
  ContrastEstimate b1;
  ContrastEstimate b2;
};

struct SimulationSummary {
  std::string model_id;
  ExposureMode exposure_mode = ExposureMode::binary_threshold;
  int n_obs = 0;
  int n_reps = 0;
  std::uint64_t master_seed = 0;

  double mean_sc = 0.0;
  double empirical_sd = 0.0;
  double percentile_low = 0.0;  // 2.5th percentile of sc
  double percentile_high = 0.0; // 97.5th percentile of sc
  double mean_ci_low = 0.0;     // average of per-replicate CI bounds
  double mean_ci_high = 0.0;
  double coverage = 0.0;
  double coverage_target = 0.0;
  double mean_reported_se = 0.0;

  double mean_b1 = 0.0;
  double mean_b2 = 0.0;
  double sd_b1 = 0.0;
  double sd_b2 = 0.0;
};

/// Per-replicate estimates in replicate order. A rank-deficient replicate
/// aborts the run with a RankDeficiencyError naming its seed and index.
std::vector<ReplicateResult> run_replicates(const SimulationConfig& config);

SimulationSummary summarize(const SimulationConfig& config, const std::vector<ReplicateResult>& reps);

SimulationSummary monte_carlo(const SimulationConfig& config);

struct Figure4Options {
  int n_reps = 1000;
  int n_obs = 5000;
  std::uint64_t master_seed = 0;
  ExposureMode exposure_mode = ExposureMode::binary_threshold;
  double confidence_level = 0.95;
  unsigned threads = 0;
};

struct Figure4Row {
  std::string preset;
  PresetFamily family;
  /// What SC identifies: theta, theta - kappa, or NaN when biased.
  double identified_value;
  SimulationSummary summary;
};

/// One Monte Carlo run per preset. Each preset's seed is derived from the
/// master seed and the preset name.
std::vector<Figure4Row> figure4_table(const Figure4Options& options);

std::uint64_t preset_seed(std::uint64_t master_seed, std::string_view preset);

/// Linear-interpolated sample quantile (type 7); `values` need not be sorted.
double sample_quantile(std::vector<double> values, double probability);

} // namespace spillover
