#include "spillover/analyzer.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "spillover/error.hpp"
#include "spillover/path_algebra.hpp"
#include "spillover/random.hpp"

namespace spillover {

std::string_view to_string(IdentificationClass cls) {
  switch (cls) {
  case IdentificationClass::point_identifies_theta: return "point-identifies-theta";
  case IdentificationClass::identifies_theta_minus_kappa: return "identifies-theta-minus-kappa";
  case IdentificationClass::biased: return "biased";
  case IdentificationClass::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

std::string_view to_string(SignAssumption sign) {
  switch (sign) {
  case SignAssumption::positive: return "positive";
  case SignAssumption::negative: return "negative";
  case SignAssumption::zero: return "zero";
  case SignAssumption::unknown: return "unknown";
  }
  return "unknown";
}

SignAssumption sign_assumption_from_string(std::string_view text) {
  if (text == "positive" || text == "+" || text == ">0") return SignAssumption::positive;
  if (text == "negative" || text == "-" || text == "<0") return SignAssumption::negative;
  if (text == "zero" || text == "0") return SignAssumption::zero;
  if (text == "unknown" || text == "?") return SignAssumption::unknown;
  throw UsageError(fmt::format("unknown sign assumption '{}'", text));
}

std::string_view to_string(BoundConclusion conclusion) {
  switch (conclusion) {
  case BoundConclusion::sc_lower_bounds_theta: return "sc-lower-bounds-theta";
  case BoundConclusion::sc_upper_bounds_theta: return "sc-upper-bounds-theta";
  case BoundConclusion::sc_equals_theta: return "sc-equals-theta";
  case BoundConclusion::theta_positive: return "theta-positive";
  case BoundConclusion::theta_negative: return "theta-negative";
  case BoundConclusion::uninformative: return "uninformative";
  }
  return "uninformative";
}

namespace {

double edge_or_zero(const PathModel& model, std::string_view from, std::string_view to) {
  return model.coefficient(from, to).value_or(0.0);
}

} // namespace

IdentificationVerdict classify_identification(const PathModel& model, int draws, std::uint64_t seed) {
  if (draws <= 0) throw PreconditionError("classification needs at least one draw");
  IdentificationVerdict verdict;
  verdict.population_sc = population_partial_regression(model).sc;
  verdict.theta_true = edge_or_zero(model, "T1", "Y2");
  verdict.kappa_true = edge_or_zero(model, "T2", "Y1");

  rng::Stream stream(seed, 0);
  auto& ev = verdict.evidence;
  ev.draws = draws;
  int biased = 0;
  for (int d = 0; d < draws; ++d) {
    const auto drawn = build_model(draw_coefficients(model.spec(), stream));
    const double sc = population_partial_regression(drawn).sc;
    const double theta = edge_or_zero(drawn, "T1", "Y2");
    const double kappa = edge_or_zero(drawn, "T2", "Y1");
    ev.max_abs_sc_minus_theta = std::max(ev.max_abs_sc_minus_theta, std::abs(sc - theta));
    ev.max_abs_sc_minus_theta_minus_kappa =
        std::max(ev.max_abs_sc_minus_theta_minus_kappa, std::abs(sc - (theta - kappa)));
    if (std::abs(sc - theta) > 1e-6) ++biased;
  }
  ev.fraction_biased = static_cast<double>(biased) / draws;

  if (ev.max_abs_sc_minus_theta < 1e-9)
    verdict.cls = IdentificationClass::point_identifies_theta;
  else if (ev.max_abs_sc_minus_theta_minus_kappa < 1e-9)
    verdict.cls = IdentificationClass::identifies_theta_minus_kappa;
  else if (ev.fraction_biased >= 0.95)
    verdict.cls = IdentificationClass::biased;
  else
    verdict.cls = IdentificationClass::inconclusive;
  return verdict;
}

BoundStatement bound_inference(double sc_value, SignAssumption kappa_sign) {
  BoundStatement s{kappa_sign, sc_value, {}};
  auto& out = s.conclusions;
  switch (kappa_sign) {
  case SignAssumption::zero:
    out.push_back(BoundConclusion::sc_equals_theta);
    if (sc_value > 0) out.push_back(BoundConclusion::theta_positive);
    if (sc_value < 0) out.push_back(BoundConclusion::theta_negative);
    break;
  case SignAssumption::positive:
    if (sc_value == 0.0) {
      out.push_back(BoundConclusion::uninformative);
      break;
    }
    out.push_back(BoundConclusion::sc_lower_bounds_theta);
    if (sc_value > 0) out.push_back(BoundConclusion::theta_positive);
    break;
  case SignAssumption::negative:
    if (sc_value == 0.0) {
      out.push_back(BoundConclusion::uninformative);
      break;
    }
    out.push_back(BoundConclusion::sc_upper_bounds_theta);
    if (sc_value < 0) out.push_back(BoundConclusion::theta_negative);
    break;
  case SignAssumption::unknown:
    out.push_back(BoundConclusion::uninformative);
    break;
  }
  return s;
}

namespace {

std::optional<MediatedPathNote> chain_note(const PathModel& model, const std::vector<std::string>& path,
                                           const std::string& what) {
  MediatedPathNote note;
  note.path = path;
  note.coefficient_product = 1.0;
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    const auto c = model.coefficient(path[k], path[k + 1]);
    if (!c || *c == 0.0) return std::nullopt;
    note.coefficient_product *= *c;
    std::string label;
    for (const auto& link : model.children(model.index_of(path[k])))
      if (model.name(link.node) == path[k + 1]) label = link.label;
    if (label.empty()) label = fmt::format("{}", *c);
    if (!note.symbolic_product.empty()) note.symbolic_product += '*';
    note.symbolic_product += label;
  }
  note.message = fmt::format("SC excludes the mediated {} path {} (product {} = {})", what,
                             fmt::join(path, " -> "), note.symbolic_product, note.coefficient_product);
  return note;
}

} // namespace

std::vector<MediatedPathNote> mediated_component_note(const PathModel& model) {
  std::vector<MediatedPathNote> notes;
  for (const char* name : {"T1", "T2", "Y1", "Y2"})
    if (!model.contains(name)) return notes;

  if (auto note = chain_note(model, {"T1", "T2", "Y2"}, "spillover"))
    notes.push_back(std::move(*note));
  const bool two_sided = edge_or_zero(model, "T2", "Y1") != 0.0;
  if (two_sided) {
    if (auto note = chain_note(model, {"T2", "T1", "Y1"}, "reverse spillover"))
      notes.push_back(std::move(*note));
  }
  return notes;
}

ModelSpec swap_siblings(const ModelSpec& spec) {
  static const std::map<std::string, std::string> swap{
      {"T1", "T2"}, {"T2", "T1"}, {"Y1", "Y2"}, {"Y2", "Y1"}};
  auto rename = [](const std::string& name) {
    auto it = swap.find(name);
    return it == swap.end() ? name : it->second;
  };
  ModelSpec out = spec;
  for (auto& v : out.variables) v.name = rename(v.name);
  for (auto& e : out.edges) {
    e.from = rename(e.from);
    e.to = rename(e.to);
  }
  for (auto& [name, definition] : out.derived) {
    if (name == "D") continue; // D stays Y2 - Y1 under the new labels
    LinearDefinition renamed;
    for (const auto& [component, weight] : definition) renamed[rename(component)] = weight;
    definition = std::move(renamed);
  }
  return out;
}

} // namespace spillover
