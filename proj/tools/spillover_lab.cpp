#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "spillover/cli.hpp"

namespace {

void add_output_options(CLI::App* cmd, spillover::RunManifest& m, bool svg) {
  cmd->add_option("--format", m.format, svg ? "csv, json or svg" : "csv or json")
      ->check(svg ? CLI::IsMember({"csv", "json", "svg"}) : CLI::IsMember({"csv", "json"}));
  cmd->add_option("--out", m.out, "Write results to this file instead of stdout");
}

void add_model_option(CLI::App* cmd, spillover::RunManifest& m) {
  cmd->add_option("--model", m.model, "Preset (fig1a..fig3c) or model spec JSON file");
  cmd->add_option_function<std::vector<std::string>>(
      "--set",
      [&m](const std::vector<std::string>& items) {
        for (const auto& item : items) {
          const auto eq = item.find('=');
          if (eq == std::string::npos) throw CLI::ValidationError("--set", "expected symbol=value");
          try {
            m.overrides.emplace_back(item.substr(0, eq), std::stod(item.substr(eq + 1)));
          } catch (const std::logic_error&) {
            throw CLI::ValidationError("--set", "'" + item + "' has a non-numeric value");
          }
        }
      },
      "Override a preset parameter, e.g. --set theta=0.2");
}

} // namespace

int main(int argc, char** argv) {
  spillover::RunManifest m;
  CLI::App app{"spillover-lab: gain-score identification of sibling spillover effects"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_flag("--error-json", m.error_json, "Report failures as a JSON object on stderr");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo study of one model");
  add_model_option(simulate, m);
  simulate->add_option("--reps", m.reps, "Replicates");
  simulate->add_option("--n", m.n, "Pairs per replicate");
  simulate->add_option("--seed", m.seed, "Master seed (required)")->required();
  simulate->add_option("--conf", m.conf, "Confidence level");
  simulate->add_option("--mode", m.mode, "binary-threshold or linear-gaussian");
  simulate->add_option("--emit-sample", m.emit_sample, "Also write one simulated sample as pair CSV");
  simulate->add_option("--replicate", m.replicate, "Replicate index for --emit-sample");
  simulate->add_option("--threads", m.threads, "Worker threads (default: SPILLOVER_LAB_THREADS)");
  add_output_options(simulate, m, true);

  auto* estimate = app.add_subcommand("estimate", "Fit the gain-score regression to pair data");
  estimate->add_option("--data", m.data, "Pair CSV (family_id,t1,t2,y1,y2[,cov_*])")->required();
  estimate->add_flag("--adjust", m.adjust, "Include the cov_* columns");
  estimate->add_flag("--both", m.both, "Report the unadjusted and adjusted fits");
  estimate->add_flag("--robust", m.robust, "HC1 heteroskedasticity-robust standard errors");
  estimate->add_option("--conf", m.conf, "Confidence level");
  add_output_options(estimate, m, false);

  auto* identify = app.add_subcommand("identify", "Classify what the spillover coefficient identifies");
  add_model_option(identify, m);
  identify->add_option("--seed", m.seed, "Seed for the coefficient draws (required)")->required();
  identify->add_option("--draws", m.draws, "Random coefficient draws");
  identify->add_option("--sc", m.sc, "Observed SC for the bound statement");
  identify->add_option("--kappa-sign", m.kappa_sign, "positive, negative, zero or unknown");
  add_output_options(identify, m, false);

  auto* paths = app.add_subcommand("paths", "List paths between two variables");
  add_model_option(paths, m);
  paths->add_option("--from", m.from, "Start variable");
  paths->add_option("--to", m.to, "End variable");
  paths->add_option("--given", m.given, "Conditioning set")->delimiter(',');
  paths->add_flag("--all", m.all_paths, "Include paths blocked by colliders");
  paths->add_flag("--allow-derived-conditioning", m.allow_derived_conditioning);
  add_output_options(paths, m, false);

  auto* figure4 = app.add_subcommand("figure4", "Monte Carlo study of all nine presets");
  figure4->add_option("--reps", m.reps, "Replicates per preset");
  figure4->add_option("--n", m.n, "Pairs per replicate");
  figure4->add_option("--seed", m.seed, "Master seed (required)")->required();
  figure4->add_option("--conf", m.conf, "Confidence level");
  figure4->add_option("--mode", m.mode, "binary-threshold or linear-gaussian");
  figure4->add_option("--threads", m.threads, "Worker threads (default: SPILLOVER_LAB_THREADS)");
  add_output_options(figure4, m, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  if (simulate->parsed()) m.subcommand = spillover::Subcommand::simulate;
  else if (estimate->parsed()) m.subcommand = spillover::Subcommand::estimate;
  else if (identify->parsed()) m.subcommand = spillover::Subcommand::identify;
  else if (paths->parsed()) m.subcommand = spillover::Subcommand::paths;
  else m.subcommand = spillover::Subcommand::figure4;

  return spillover::run(m, std::cout, std::cerr);
}
