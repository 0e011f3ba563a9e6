#include "spillover/cli.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "spillover/analyzer.hpp"
#include "spillover/error.hpp"
#include "spillover/pair_csv.hpp"
#include "spillover/report.hpp"
#include "spillover/simulator.hpp"

namespace spillover {

std::string_view to_string(Subcommand cmd) {
  switch (cmd) {
  case Subcommand::simulate: return "simulate";
  case Subcommand::estimate: return "estimate";
  case Subcommand::identify: return "identify";
  case Subcommand::paths: return "paths";
  case Subcommand::figure4: return "figure4";
  }
  return "";
}

void validate_manifest(const RunManifest& m) {
  if (m.format != "csv" && m.format != "json" && m.format != "svg")
    throw UsageError(fmt::format("unknown format '{}' (expected csv, json or svg)", m.format));
  if (m.format == "svg" && m.subcommand != Subcommand::simulate && m.subcommand != Subcommand::figure4)
    throw UsageError(fmt::format("--format svg is only available for simulate and figure4, not {}",
                                 to_string(m.subcommand)));
  const bool randomized = m.subcommand == Subcommand::simulate || m.subcommand == Subcommand::identify ||
                          m.subcommand == Subcommand::figure4;
  if (randomized && !m.seed)
    throw UsageError(fmt::format("{} requires an explicit --seed", to_string(m.subcommand)));
  if (m.subcommand == Subcommand::estimate && !m.data) throw UsageError("estimate requires --data");
  if (!(m.conf > 0.0 && m.conf < 1.0)) throw UsageError("--conf must lie strictly between 0 and 1");
  if (m.reps < 2) throw UsageError("--reps must be at least 2");
  if (m.n < 1) throw UsageError("--n must be positive");
  if (m.draws < 1) throw UsageError("--draws must be positive");
  if (m.both && m.adjust) throw UsageError("--both already includes the adjusted fit; drop --adjust");
  exposure_mode_from_string(m.mode);
  if (m.kappa_sign) sign_assumption_from_string(*m.kappa_sign);
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open '{}' for reading", path));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

struct ResolvedModel {
  std::string id;
  bool preset = false;
  SiblingParameters parameters;
  std::optional<ModelSpec> spec; // custom models
};

ResolvedModel resolve_model(const RunManifest& m) {
  ResolvedModel r;
  if (is_preset(m.model)) {
    r.id = m.model;
    r.preset = true;
    r.parameters = find_preset(m.model).parameters;
    for (const auto& [symbol, value] : m.overrides) r.parameters[symbol] = value;
    return r;
  }
  if (!m.overrides.empty()) throw UsageError("--set only applies to preset models");
  r.id = "custom";
  r.spec = model_spec_from_json(read_file(m.model));
  return r;
}

PathModel analysis_model(const ResolvedModel& r) {
  return r.preset ? sibling_model(r.parameters) : build_model(*r.spec);
}

SimulationConfig simulation_config(const RunManifest& m, const ResolvedModel& r) {
  SimulationConfig config;
  config.exposure_mode = exposure_mode_from_string(m.mode);
  if (r.preset) {
    config.model_id = r.id;
    config.parameters = r.parameters;
  } else {
    config.model_id = "custom";
    config.custom_model = r.spec;
  }
  config.n_obs = m.n;
  config.n_reps = m.reps;
  config.master_seed = *m.seed;
  config.confidence_level = m.conf;
  config.threads = m.threads;
  return config;
}

void emit_json(const Json& doc, std::ostream& out) { out << doc.dump(2) << '\n'; }

void run_simulate(const RunManifest& m, std::ostream& out) {
  const auto config = simulation_config(m, resolve_model(m));
  if (m.emit_sample) save_pair_csv(simulate_sample(config, m.replicate), *m.emit_sample);
  const auto summary = monte_carlo(config);
  if (m.format == "json") emit_json(to_json(summary), out);
  else if (m.format == "svg") write_summary_svg({summary}, out);
  else write_summary_csv({summary}, out);
}

void run_estimate(const RunManifest& m, std::ostream& out, std::ostream& err) {
  const auto loaded = load_pair_csv(*m.data);
  for (const auto& w : loaded.warnings) fmt::print(err, "warning: {}\n", w);
  FitOptions options;
  options.covariance = m.robust ? CovarianceType::hc1 : CovarianceType::classical;

  std::vector<LabelledReport> reports;
  if (m.both || !m.adjust) {
    options.adjust_covariates = false;
    reports.push_back({"unadjusted", spillover_estimate(loaded.data, options, m.conf)});
  }
  if (m.both || m.adjust) {
    options.adjust_covariates = true;
    reports.push_back({"adjusted", spillover_estimate(loaded.data, options, m.conf)});
  }
  if (m.format == "json") {
    Json doc{{"source", *m.data}, {"dropped_rows", loaded.dropped_rows}, {"reports", estimate_json(reports)}};
    emit_json(doc, out);
  } else {
    write_estimate_csv(reports, out);
  }
}

SignAssumption default_kappa_sign(const PathModel& model) {
  const double kappa = model.coefficient("T2", "Y1").value_or(0.0);
  if (kappa > 0) return SignAssumption::positive;
  if (kappa < 0) return SignAssumption::negative;
  return SignAssumption::zero;
}

void run_identify(const RunManifest& m, std::ostream& out) {
  const auto resolved = resolve_model(m);
  const auto model = analysis_model(resolved);
  const auto verdict = classify_identification(model, m.draws, *m.seed);
  const auto sign = m.kappa_sign ? sign_assumption_from_string(*m.kappa_sign) : default_kappa_sign(model);
  const double sc = m.sc.value_or(verdict.population_sc);
  const bool identifying = verdict.cls == IdentificationClass::point_identifies_theta ||
                           verdict.cls == IdentificationClass::identifies_theta_minus_kappa;
  const auto bound = identifying ? bound_inference(sc, sign)
                                 : BoundStatement{sign, sc, {BoundConclusion::uninformative}};
  const auto notes = mediated_component_note(model);

  if (m.format == "json") {
    Json mediated = Json::array();
    for (const auto& n : notes) mediated.push_back(to_json(n));
    emit_json(Json{{"model", resolved.id},
                   {"identification", to_json(verdict)},
                   {"bound", to_json(bound)},
                   {"mediated_paths", mediated}},
              out);
    return;
  }
  out << "section,key,value\n";
  fmt::print(out, "identification,class,{}\n", to_string(verdict.cls));
  fmt::print(out, "identification,population_sc,{}\n", verdict.population_sc);
  fmt::print(out, "identification,theta_true,{}\n", verdict.theta_true);
  fmt::print(out, "identification,kappa_true,{}\n", verdict.kappa_true);
  fmt::print(out, "identification,draws,{}\n", verdict.evidence.draws);
  fmt::print(out, "identification,fraction_biased,{}\n", verdict.evidence.fraction_biased);
  fmt::print(out, "bound,kappa_sign,{}\n", to_string(bound.assumption));
  fmt::print(out, "bound,sc_value,{}\n", bound.sc_value);
  for (auto c : bound.conclusions) fmt::print(out, "bound,conclusion,{}\n", to_string(c));
  for (const auto& n : notes) fmt::print(out, "mediated,{},{}\n", n.symbolic_product, n.coefficient_product);
}

void run_paths(const RunManifest& m, std::ostream& out) {
  const auto model = analysis_model(resolve_model(m));
  PathQuery query;
  query.conditioning = std::set<std::string>(m.given.begin(), m.given.end());
  query.allow_derived_conditioning = m.allow_derived_conditioning;
  auto paths = enumerate_paths(model, m.from, m.to, query);
  if (!m.all_paths) paths = collider_free_paths(paths);
  if (m.format == "json") emit_json(paths_json(paths), out);
  else write_paths_csv(paths, out);
}

void run_figure4(const RunManifest& m, std::ostream& out) {
  Figure4Options options;
  options.n_reps = m.reps;
  options.n_obs = m.n;
  options.master_seed = *m.seed;
  options.exposure_mode = exposure_mode_from_string(m.mode);
  options.confidence_level = m.conf;
  options.threads = m.threads;
  const auto rows = figure4_table(options);
  if (m.format == "json") emit_json(figure4_json(rows), out);
  else if (m.format == "svg") write_figure4_svg(rows, out);
  else write_figure4_csv(rows, out);
}

void dispatch(const RunManifest& m, std::ostream& out, std::ostream& err) {
  switch (m.subcommand) {
  case Subcommand::simulate: run_simulate(m, out); break;
  case Subcommand::estimate: run_estimate(m, out, err); break;
  case Subcommand::identify: run_identify(m, out); break;
  case Subcommand::paths: run_paths(m, out); break;
  case Subcommand::figure4: run_figure4(m, out); break;
  }
}

void report_error(const RunManifest& m, std::ostream& err, std::string_view kind, int code,
                  std::string_view message) {
  if (m.error_json) {
    err << Json{{"error", kind}, {"exit_code", code}, {"message", message}}.dump() << '\n';
  } else {
    fmt::print(err, "error: {}: {}\n", kind, message);
  }
}

} // namespace

int run(const RunManifest& m, std::ostream& out, std::ostream& err) {
  try {
    validate_manifest(m);
    if (m.out) {
      // Render fully before touching the file so a failure leaves no partial output.
      std::ostringstream buffer;
      dispatch(m, buffer, err);
      std::ofstream file(*m.out, std::ios::binary);
      if (!file) throw IoError(fmt::format("cannot open '{}' for writing", *m.out));
      file << buffer.str();
      file.close();
      if (!file) throw IoError(fmt::format("failed writing '{}'", *m.out));
    } else {
      dispatch(m, out, err);
    }
    return 0;
  } catch (const Error& e) {
    report_error(m, err, e.kind(), e.exit_code(), e.what());
    return e.exit_code();
  } catch (const std::exception& e) {
    report_error(m, err, "InternalError", 3, e.what());
    return 3;
  }
}

} // namespace spillover
