#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace spillover {

enum class Subcommand { simulate, estimate, identify, paths, figure4 };

std::string_view to_string(Subcommand cmd);

struct RunManifest {
  Subcommand subcommand = Subcommand::simulate;

  std::string model = "fig1a";          // preset name or path to a spec JSON
  std::optional<std::string> data;      // pair CSV (estimate)
  std::optional<std::string> out;       // default: the output stream
  std::optional<std::uint64_t> seed;    // required by simulate, identify, figure4
  std::string format = "csv";           // csv | json | svg

  int reps = 1000;
  int n = 5000;
  double conf = 0.95;
  std::string mode = "binary-threshold";
  std::vector<std::pair<std::string, double>> overrides; // --set symbol=value
  std::optional<std::string> emit_sample;
  std::uint64_t replicate = 0;
  unsigned threads = 0;

  bool adjust = false;
  bool both = false; // estimate with and without covariates
  bool robust = false;

  std::string from = "T1";
  std::string to = "D";
  std::vector<std::string> given;
  bool all_paths = false;
  bool allow_derived_conditioning = false;

  std::optional<double> sc;
  std::optional<std::string> kappa_sign;
  int draws = 200;

  bool error_json = false;
};

/// Throws UsageError describing the first inconsistency.
void validate_manifest(const RunManifest& manifest);

/// Executes a manifest. Results go to `out` (or --out), diagnostics to
/// `err`. Returns 0, or the failure class exit code: 1 usage, 2 data,
/// 3 numeric.
int run(const RunManifest& manifest, std::ostream& out, std::ostream& err);

} // namespace spillover
