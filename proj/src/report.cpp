#include "spillover/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "spillover/error.hpp"

namespace spillover {

namespace {

Json merged(Json base, const Json& extra) {
  base.update(extra);
  return base;
}

// JSON has no NaN; non-finite values become null.
Json number(double value) { return std::isfinite(value) ? Json(value) : Json(nullptr); }

double number_from(const Json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

Json contrast_json(const ContrastEstimate& c) {
  return Json{{"estimate", number(c.estimate)},
              {"se", number(c.se)},
              {"ci_low", number(c.ci_low)},
              {"ci_high", number(c.ci_high)}};
}

ContrastEstimate contrast_from(const Json& j, double level) {
  ContrastEstimate c;
  c.estimate = number_from(j.at("estimate"));
  c.se = number_from(j.at("se"));
  c.ci_low = number_from(j.at("ci_low"));
  c.ci_high = number_from(j.at("ci_high"));
  c.confidence_level = level;
  return c;
}

std::string csv_number(double value) {
  return std::isfinite(value) ? fmt::format("{}", value) : std::string();
}

std::string covariance_name(CovarianceType t) {
  return t == CovarianceType::classical ? "classical" : "hc1";
}

std::string family_name(PresetFamily f) {
  switch (f) {
  case PresetFamily::one_sided: return "one-sided";
  case PresetFamily::two_sided: return "two-sided";
  case PresetFamily::outcome_spillover: return "outcome-spillover";
  }
  return "";
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    case '&': out += "&amp;"; break;
    default: out += c;
    }
  }
  return out;
}

} // namespace

Json to_json(const SpilloverReport& r) {
  Json doc;
  doc["n"] = r.n;
  doc["df_residual"] = r.df_residual;
  doc["confidence_level"] = r.confidence_level;
  doc["adjusted"] = r.adjusted;
  doc["covariance"] = covariance_name(r.covariance_type);
  doc["terms"] = Json::array();
  doc["terms"].push_back(merged({{"term", "b2"}, {"variable", "T2"}}, contrast_json(r.b2)));
  doc["terms"].push_back(merged({{"term", "b1"}, {"variable", "T1"}}, contrast_json(r.b1)));
  doc["terms"].push_back(merged({{"term", "sc"}, {"variable", "T1+T2"}}, contrast_json(r.sc)));
  return doc;
}

SpilloverReport spillover_report_from_json(const Json& doc) {
  try {
    SpilloverReport r;
    r.n = doc.at("n").get<std::size_t>();
    r.df_residual = doc.at("df_residual").get<long>();
    r.confidence_level = doc.at("confidence_level").get<double>();
    r.adjusted = doc.at("adjusted").get<bool>();
    r.covariance_type = doc.at("covariance").get<std::string>() == "hc1" ? CovarianceType::hc1
                                                                        : CovarianceType::classical;
    for (const auto& term : doc.at("terms")) {
      const auto name = term.at("term").get<std::string>();
      auto c = contrast_from(term, r.confidence_level);
      if (name == "b1") r.b1 = c;
      else if (name == "b2") r.b2 = c;
      else if (name == "sc") r.sc = c;
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(fmt::format("malformed spillover report: {}", e.what()));
  }
}

Json estimate_json(const std::vector<LabelledReport>& reports) {
  Json doc = Json::array();
  for (const auto& [label, report] : reports) doc.push_back(merged({{"model", label}}, to_json(report)));
  return doc;
}

void write_estimate_csv(const std::vector<LabelledReport>& reports, std::ostream& out) {
  out << "model,term,variable,estimate,se,ci_low,ci_high,confidence_level,n,df_residual,covariance\n";
  for (const auto& [label, r] : reports) {
    const std::tuple<const char*, const char*, const ContrastEstimate*> rows[] = {
        {"b2", "T2", &r.b2}, {"b1", "T1", &r.b1}, {"sc", "T1+T2", &r.sc}};
    for (const auto& [term, variable, c] : rows)
      fmt::print(out, "{},{},{},{},{},{},{},{},{},{},{}\n", label, term, variable, csv_number(c->estimate),
                 csv_number(c->se), csv_number(c->ci_low), csv_number(c->ci_high), r.confidence_level,
                 r.n, r.df_residual, covariance_name(r.covariance_type));
  }
}

Json to_json(const SimulationSummary& s) {
  return Json{{"model", s.model_id},
              {"exposure_mode", std::string(to_string(s.exposure_mode))},
              {"n_obs", s.n_obs},
              {"n_reps", s.n_reps},
              {"master_seed", s.master_seed},
              {"mean_sc", number(s.mean_sc)},
              {"empirical_sd", number(s.empirical_sd)},
              {"percentile_low", number(s.percentile_low)},
              {"percentile_high", number(s.percentile_high)},
              {"mean_ci_low", number(s.mean_ci_low)},
              {"mean_ci_high", number(s.mean_ci_high)},
              {"coverage", number(s.coverage)},
              {"coverage_target", number(s.coverage_target)},
              {"mean_reported_se", number(s.mean_reported_se)},
              {"mean_b1", number(s.mean_b1)},
              {"mean_b2", number(s.mean_b2)},
              {"sd_b1", number(s.sd_b1)},
              {"sd_b2", number(s.sd_b2)}};
}

namespace {

constexpr const char* kSummaryHeader =
    "model,exposure_mode,n_obs,n_reps,master_seed,mean_sc,empirical_sd,percentile_low,"
    "percentile_high,mean_ci_low,mean_ci_high,coverage,coverage_target,mean_reported_se,"
    "mean_b1,mean_b2,sd_b1,sd_b2";

void write_summary_fields(const SimulationSummary& s, std::ostream& out) {
  fmt::print(out, "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}", s.model_id,
             to_string(s.exposure_mode), s.n_obs, s.n_reps, s.master_seed, csv_number(s.mean_sc),
             csv_number(s.empirical_sd), csv_number(s.percentile_low), csv_number(s.percentile_high),
             csv_number(s.mean_ci_low), csv_number(s.mean_ci_high), csv_number(s.coverage),
             csv_number(s.coverage_target), csv_number(s.mean_reported_se), csv_number(s.mean_b1),
             csv_number(s.mean_b2), csv_number(s.sd_b1), csv_number(s.sd_b2));
}

} // namespace

void write_summary_csv(const std::vector<SimulationSummary>& summaries, std::ostream& out) {
  out << kSummaryHeader << '\n';
  for (const auto& s : summaries) {
    write_summary_fields(s, out);
    out << '\n';
  }
}

Json figure4_json(const std::vector<Figure4Row>& rows) {
  Json doc = Json::array();
  for (const auto& row : rows) {
    Json j{{"preset", row.preset},
           {"family", family_name(row.family)},
           {"identified_value", number(row.identified_value)}};
    j.update(to_json(row.summary));
    doc.push_back(std::move(j));
  }
  return doc;
}

void write_figure4_csv(const std::vector<Figure4Row>& rows, std::ostream& out) {
  out << "preset,family,identified_value," << kSummaryHeader << '\n';
  for (const auto& row : rows) {
    fmt::print(out, "{},{},{},", row.preset, family_name(row.family), csv_number(row.identified_value));
    write_summary_fields(row.summary, out);
    out << '\n';
  }
}

void write_summary_svg(const std::vector<SimulationSummary>& summaries, std::ostream& out) {
  constexpr double width = 720, row_height = 36, top = 40, left = 110, right = 30, bottom = 50;
  const double height = top + bottom + row_height * static_cast<double>(summaries.size());

  double lo = 0.2, hi = 0.5;
  for (const auto& s : summaries) {
    if (std::isfinite(s.percentile_low)) lo = std::min(lo, s.percentile_low);
    if (std::isfinite(s.percentile_high)) hi = std::max(hi, s.percentile_high);
  }
  const double pad = 0.1 * (hi - lo);
  lo -= pad;
  hi += pad;
  const auto x = [&](double v) { return left + (v - lo) / (hi - lo) * (width - left - right); };
  const double axis_y = top + row_height * static_cast<double>(summaries.size());

  fmt::print(out,
             "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
             "font-family=\"sans-serif\" font-size=\"12\">\n",
             width, height);
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (double ref : {0.5, 0.2})
    fmt::print(out,
               "<line x1=\"{0:.2f}\" y1=\"{1}\" x2=\"{0:.2f}\" y2=\"{2}\" stroke=\"#888\" "
               "stroke-dasharray=\"5,4\"/>\n",
               x(ref), top - 10, axis_y);
  for (std::size_t i = 0; i < summaries.size(); ++i) {
    const auto& s = summaries[i];
    const double y = top + row_height * (static_cast<double>(i) + 0.5);
    fmt::print(out, "<text x=\"{}\" y=\"{:.2f}\" text-anchor=\"end\">{}</text>\n", left - 10, y + 4,
               xml_escape(s.model_id));
    fmt::print(out,
               "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"black\"/>\n",
               x(s.percentile_low), y, x(s.percentile_high), y);
    fmt::print(out, "<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"4\" fill=\"black\"/>\n", x(s.mean_sc), y);
  }
  fmt::print(out, "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n", left, axis_y,
             width - right, axis_y);
  const double step = (hi - lo) > 1.5 ? 0.5 : 0.1;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-12; t += step) {
    fmt::print(out, "<line x1=\"{0:.2f}\" y1=\"{1}\" x2=\"{0:.2f}\" y2=\"{2}\" stroke=\"black\"/>\n",
               x(t), axis_y, axis_y + 5);
    fmt::print(out, "<text x=\"{:.2f}\" y=\"{}\" text-anchor=\"middle\">{:.1f}</text>\n", x(t),
               axis_y + 18, std::abs(t) < 1e-12 ? 0.0 : t);
  }
  fmt::print(out, "<text x=\"{:.2f}\" y=\"{}\" text-anchor=\"middle\">Spillover coefficient</text>\n",
             (left + width - right) / 2, axis_y + 38);
  out << "</svg>\n";
}

void write_figure4_svg(const std::vector<Figure4Row>& rows, std::ostream& out) {
  std::vector<SimulationSummary> summaries;
  for (const auto& row : rows) summaries.push_back(row.summary);
  write_summary_svg(summaries, out);
}

Json to_json(const IdentificationVerdict& v) {
  return Json{{"class", std::string(to_string(v.cls))},
              {"population_sc", number(v.population_sc)},
              {"theta_true", number(v.theta_true)},
              {"kappa_true", number(v.kappa_true)},
              {"evidence",
               {{"draws", v.evidence.draws},
                {"max_abs_sc_minus_theta", number(v.evidence.max_abs_sc_minus_theta)},
                {"max_abs_sc_minus_theta_minus_kappa",
                 number(v.evidence.max_abs_sc_minus_theta_minus_kappa)},
                {"fraction_biased", number(v.evidence.fraction_biased)}}}};
}

Json to_json(const BoundStatement& b) {
  Json conclusions = Json::array();
  for (auto c : b.conclusions) conclusions.push_back(std::string(to_string(c)));
  return Json{{"kappa_sign", std::string(to_string(b.assumption))},
              {"sc_value", number(b.sc_value)},
              {"conclusions", conclusions}};
}

Json to_json(const MediatedPathNote& note) {
  return Json{{"path", note.path},
              {"symbolic_product", note.symbolic_product},
              {"coefficient_product", number(note.coefficient_product)},
              {"message", note.message}};
}

Json to_json(const SymbolicVerdict& v) {
  Json checks = Json::array();
  for (const auto& c : v.checks)
    checks.push_back(Json{{"coefficient", c.coefficient},
                          {"expected", c.expected_form},
                          {"max_abs_error", number(c.max_abs_error)},
                          {"fraction_biased", number(c.fraction_biased)},
                          {"passed", c.passed}});
  return Json{{"preset", v.preset}, {"draws", v.draws}, {"passed", v.passed()}, {"checks", checks}};
}

Json paths_json(const std::vector<Path>& paths) {
  Json doc = Json::array();
  for (const auto& p : paths) {
    Json j{{"path", p.to_string()},
           {"nodes", p.nodes},
           {"causal", p.causal},
           {"status", std::string(to_string(p.status))},
           {"blocking_node", p.blocking_node ? Json(*p.blocking_node) : Json(nullptr)},
           {"coefficient_product", number(p.coefficient_product)},
           {"symbolic_product", p.symbolic_product}};
    doc.push_back(std::move(j));
  }
  return doc;
}

void write_paths_csv(const std::vector<Path>& paths, std::ostream& out) {
  out << "index,path,causal,status,blocking_node,coefficient_product,symbolic_product\n";
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const auto& p = paths[i];
    fmt::print(out, "{},{},{},{},{},{},{}\n", i + 1, p.to_string(), p.causal ? "true" : "false",
               to_string(p.status), p.blocking_node.value_or(""), csv_number(p.coefficient_product),
               p.symbolic_product);
  }
}

} // namespace spillover
