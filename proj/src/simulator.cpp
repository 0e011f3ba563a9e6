#include "spillover/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "spillover/error.hpp"
#include "spillover/parallel.hpp"
#include "spillover/random.hpp"

namespace spillover {

std::string_view to_string(ExposureMode mode) {
  return mode == ExposureMode::binary_threshold ? "binary-threshold" : "linear-gaussian";
}

ExposureMode exposure_mode_from_string(std::string_view text) {
  if (text == "binary-threshold" || text == "binary") return ExposureMode::binary_threshold;
  if (text == "linear-gaussian" || text == "linear") return ExposureMode::linear_gaussian;
  throw ConfigError(fmt::format("unknown exposure mode '{}'", text));
}

SimulationConfig preset_config(std::string_view preset, ExposureMode mode) {
  const auto& p = find_preset(preset);
  SimulationConfig config;
  config.model_id = p.name;
  config.parameters = p.parameters;
  config.exposure_mode = mode;
  return config;
}

PathModel simulation_model(const SimulationConfig& config) {
  if (!(config.outcome_noise_variance >= 0.0) || !std::isfinite(config.outcome_noise_variance))
    throw ConfigError("outcome noise variance must be finite and non-negative");
  try {
    if (config.custom_model) return build_model(*config.custom_model);
    find_preset(config.model_id);
    SiblingNoise noise;
    noise.exposure = config.exposure_mode == ExposureMode::linear_gaussian ? 1.0 : 0.0;
    noise.outcome = config.outcome_noise_variance;
    return sibling_model(config.parameters, noise);
  } catch (const SimultaneityError& e) {
    throw ConfigError(e.what());
  }
}

namespace {

struct NodePlan {
  std::size_t index;
  double noise_sd;
  std::uint64_t tag;
  std::optional<double> threshold;
  std::vector<std::pair<std::size_t, double>> parents;
};

struct SamplePlan {
  std::vector<NodePlan> nodes;
  std::size_t width = 0;
  std::size_t t1 = 0, t2 = 0, y1 = 0, y2 = 0;
};

SamplePlan make_plan(const SimulationConfig& config, const PathModel& model) {
  if (config.n_obs <= 0) throw ConfigError("n_obs must be positive");
  for (const char* required : {"T1", "T2", "Y1", "Y2"})
    if (!model.contains(required))
      throw ConfigError(fmt::format("simulation model lacks variable '{}'", required));

  SamplePlan plan;
  plan.width = model.size();
  plan.t1 = model.index_of("T1");
  plan.t2 = model.index_of("T2");
  plan.y1 = model.index_of("Y1");
  plan.y2 = model.index_of("Y2");
  for (auto i : model.topological_order()) {
    if (model.is_derived(i)) continue;
    const auto& v = model.variable(i);
    NodePlan node{i, std::sqrt(v.noise_variance), rng::tag_of(v.name), std::nullopt, {}};
    if (config.exposure_mode == ExposureMode::binary_threshold && v.kind == VariableKind::exposure) {
      auto it = config.thresholds.find(v.name);
      if (it == config.thresholds.end())
        throw ConfigError(fmt::format("no threshold configured for exposure '{}'", v.name));
      node.threshold = it->second;
    }
    for (const auto& link : model.parents(i))
      if (!link.definitional) node.parents.emplace_back(link.node, link.coefficient);
    plan.nodes.push_back(std::move(node));
  }
  return plan;
}

PairDataset draw(const SamplePlan& plan, const SimulationConfig& config, std::uint64_t replicate) {
  const rng::Philox4x64::Key key{config.master_seed, replicate};
  PairDataset data;
  data.rows.resize(static_cast<std::size_t>(config.n_obs));
  std::vector<double> value(plan.width, 0.0);
  for (std::size_t row = 0; row < data.rows.size(); ++row) {
    for (const auto& node : plan.nodes) {
      double v = 0.0;
      for (const auto& [parent, coefficient] : node.parents) v += coefficient * value[parent];
      if (node.noise_sd > 0.0) v += node.noise_sd * rng::normal_at(key, row, node.tag);
      if (node.threshold) v = v > *node.threshold ? 1.0 : 0.0;
      value[node.index] = v;
    }
    auto& r = data.rows[row];
    r.family_id = std::to_string(row + 1);
    r.t1 = value[plan.t1];
    r.t2 = value[plan.t2];
    r.y1 = value[plan.y1];
    r.y2 = value[plan.y2];
  }
  return data;
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

} // namespace

PairDataset simulate_sample(const SimulationConfig& config, std::uint64_t replicate_index) {
  const auto model = simulation_model(config);
  return draw(make_plan(config, model), config, replicate_index);
}

std::vector<ReplicateResult> run_replicates(const SimulationConfig& config) {
  if (config.n_reps < 2) throw ConfigError("n_reps must be at least 2");
  const auto model = simulation_model(config);
  const auto plan = make_plan(config, model);

  std::vector<ReplicateResult> results(static_cast<std::size_t>(config.n_reps));
  parallel_for(results.size(), resolve_thread_count(config.threads), [&](std::size_t r) {
    const auto data = draw(plan, config, r);
    try {
      const auto report = spillover_estimate(data, {}, config.confidence_level);
      results[r] = {r, report.sc, report.b1, report.b2};
    } catch (const RankDeficiencyError& e) {
      throw RankDeficiencyError(fmt::format("{}: replicate {} (master_seed {}): {}", config.model_id, r,
                                            config.master_seed, e.what()));
    }
  });
  return results;
}

double sample_quantile(std::vector<double> values, double probability) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * probability;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

SimulationSummary summarize(const SimulationConfig& config, const std::vector<ReplicateResult>& reps) {
  SimulationSummary s;
  s.model_id = config.model_id;
  s.exposure_mode = config.exposure_mode;
  s.n_obs = config.n_obs;
  s.n_reps = static_cast<int>(reps.size());
  s.master_seed = config.master_seed;
  if (config.coverage_target) {
    s.coverage_target = *config.coverage_target;
  } else {
    s.coverage_target = simulation_model(config).coefficient("T1", "Y2").value_or(0.0);
  }

  std::vector<double> sc, se, lo, hi, b1, b2;
  for (const auto& r : reps) {
    sc.push_back(r.sc.estimate);
    se.push_back(r.sc.se);
    lo.push_back(r.sc.ci_low);
    hi.push_back(r.sc.ci_high);
    b1.push_back(r.b1.estimate);
    b2.push_back(r.b2.estimate);
  }
  s.mean_sc = mean_of(sc);
  s.empirical_sd = sd_of(sc);
  s.percentile_low = sample_quantile(sc, 0.025);
  s.percentile_high = sample_quantile(sc, 0.975);
  s.mean_ci_low = mean_of(lo);
  s.mean_ci_high = mean_of(hi);
  s.mean_reported_se = mean_of(se);
  std::size_t covered = 0;
  for (const auto& r : reps)
    if (r.sc.ci_low <= s.coverage_target && s.coverage_target <= r.sc.ci_high) ++covered;
  s.coverage = static_cast<double>(covered) / static_cast<double>(reps.size());
  s.mean_b1 = mean_of(b1);
  s.mean_b2 = mean_of(b2);
  s.sd_b1 = sd_of(b1);
  s.sd_b2 = sd_of(b2);
  return s;
}

SimulationSummary monte_carlo(const SimulationConfig& config) {
  return summarize(config, run_replicates(config));
}

std::uint64_t preset_seed(std::uint64_t master_seed, std::string_view preset) {
  return rng::mix64(master_seed ^ rng::tag_of(preset));
}

std::vector<Figure4Row> figure4_table(const Figure4Options& options) {
  std::vector<Figure4Row> rows;
  for (const auto& preset : presets()) {
    auto config = preset_config(preset.name, options.exposure_mode);
    config.n_reps = options.n_reps;
    config.n_obs = options.n_obs;
    config.master_seed = preset_seed(options.master_seed, preset.name);
    config.confidence_level = options.confidence_level;
    config.threads = options.threads;

    double identified = std::numeric_limits<double>::quiet_NaN();
    if (preset.family == PresetFamily::one_sided) identified = preset.parameters.theta;
    if (preset.family == PresetFamily::two_sided)
      identified = preset.parameters.theta - preset.parameters.kappa;
    rows.push_back({preset.name, preset.family, identified, monte_carlo(config)});
  }
  return rows;
}

} // namespace spillover
