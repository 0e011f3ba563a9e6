#pragma once

// Serialisation of results. Numbers are written in shortest round-trip
// form so identical results always produce identical bytes.

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "spillover/analyzer.hpp"
#include "spillover/estimator.hpp"
#include "spillover/path_algebra.hpp"
#include "spillover/sem_graph.hpp"
#include "spillover/simulator.hpp"

namespace spillover {

using Json = nlohmann::ordered_json;

// Report rows: own-exposure coefficient of sibling 2 (b2), of sibling 1
// (b1), then the spillover coefficient.
struct LabelledReport {
  std::string label; // "unadjusted" / "adjusted"
  SpilloverReport report;
};

Json to_json(const SpilloverReport& report);
SpilloverReport spillover_report_from_json(const Json& doc);
void write_estimate_csv(const std::vector<LabelledReport>& reports, std::ostream& out);
Json estimate_json(const std::vector<LabelledReport>& reports);

Json to_json(const SimulationSummary& summary);
void write_summary_csv(const std::vector<SimulationSummary>& summaries, std::ostream& out);

Json figure4_json(const std::vector<Figure4Row>& rows);
void write_figure4_csv(const std::vector<Figure4Row>& rows, std::ostream& out);
/// Dot-and-whisker plot: one row per model, point at mean SC, whiskers
/// spanning the percentile interval, dashed reference lines at 0.5 and 0.2.
void write_figure4_svg(const std::vector<Figure4Row>& rows, std::ostream& out);
void write_summary_svg(const std::vector<SimulationSummary>& summaries, std::ostream& out);

Json to_json(const IdentificationVerdict& verdict);
Json to_json(const BoundStatement& bound);
Json to_json(const MediatedPathNote& note);
Json to_json(const SymbolicVerdict& verdict);

Json paths_json(const std::vector<Path>& paths);
void write_paths_csv(const std::vector<Path>& paths, std::ostream& out);

} // namespace spillover
