#include <doctest.h>

#include "spillover/analyzer.hpp"
#include "spillover/error.hpp"
#include "spillover/path_algebra.hpp"

using namespace spillover;

namespace {

IdentificationVerdict classify(const std::string& preset) {
  return classify_identification(sibling_model(find_preset(preset).parameters), 100, 5);
}

bool has(const BoundStatement& s, BoundConclusion c) {
  return std::find(s.conclusions.begin(), s.conclusions.end(), c) != s.conclusions.end();
}

} // namespace

TEST_CASE("identification classes of the presets") {
  for (const char* name : {"fig1a", "fig1b", "fig1c"}) {
    CAPTURE(name);
    CHECK(classify(name).cls == IdentificationClass::point_identifies_theta);
  }
  for (const char* name : {"fig2a", "fig2b", "fig2c"}) {
    CAPTURE(name);
    const auto v = classify(name);
    CHECK(v.cls == IdentificationClass::identifies_theta_minus_kappa);
    CHECK(v.population_sc == doctest::Approx(0.2));
    CHECK(v.kappa_true == doctest::Approx(0.3));
  }
  for (const char* name : {"fig3a", "fig3b", "fig3c"}) {
    CAPTURE(name);
    const auto v = classify(name);
    CHECK(v.cls == IdentificationClass::biased);
    CHECK(v.evidence.fraction_biased >= 0.95);
  }
}

TEST_CASE("exposure spillover direction does not change the two-sided answer") {
  const auto b = classify("fig2b");
  const auto c = classify("fig2c");
  CHECK(b.cls == c.cls);
  CHECK(b.population_sc == doctest::Approx(c.population_sc).epsilon(1e-12));
}

TEST_CASE("relabelling the siblings swaps the roles of theta and kappa") {
  const auto spec = sibling_model_spec(find_preset("fig2a").parameters);
  const auto swapped = build_model(swap_siblings(spec));
  CHECK(swapped.coefficient("T2", "Y1") == doctest::Approx(0.5));
  CHECK(swapped.coefficient("T1", "Y2") == doctest::Approx(0.3));
  CHECK(swapped.coefficient("Y1", "D") == doctest::Approx(-1.0));
  const auto v = classify_identification(swapped, 50, 1);
  CHECK(v.cls == IdentificationClass::identifies_theta_minus_kappa);
  CHECK(v.population_sc == doctest::Approx(0.3 - 0.5));
  CHECK(build_model(swap_siblings(swap_siblings(spec))).coefficient("T1", "Y2") == doctest::Approx(0.5));
}

TEST_CASE("sign assumptions on kappa") {
  auto pos = bound_inference(0.2, SignAssumption::positive);
  CHECK(has(pos, BoundConclusion::sc_lower_bounds_theta));
  CHECK(has(pos, BoundConclusion::theta_positive));

  auto pos_neg_sc = bound_inference(-0.1, SignAssumption::positive);
  CHECK(has(pos_neg_sc, BoundConclusion::sc_lower_bounds_theta));
  CHECK_FALSE(has(pos_neg_sc, BoundConclusion::theta_positive));

  auto neg = bound_inference(-0.4, SignAssumption::negative);
  CHECK(has(neg, BoundConclusion::sc_upper_bounds_theta));
  CHECK(has(neg, BoundConclusion::theta_negative));

  CHECK(has(bound_inference(0.5, SignAssumption::zero), BoundConclusion::sc_equals_theta));
  CHECK(bound_inference(0.5, SignAssumption::unknown).conclusions ==
        std::vector<BoundConclusion>{BoundConclusion::uninformative});
  CHECK(bound_inference(0.0, SignAssumption::positive).conclusions ==
        std::vector<BoundConclusion>{BoundConclusion::uninformative});

  CHECK(sign_assumption_from_string("+") == SignAssumption::positive);
  CHECK_THROWS_AS(sign_assumption_from_string("maybe"), UsageError);
}

TEST_CASE("mediated path notes") {
  CHECK(mediated_component_note(sibling_model(find_preset("fig1a").parameters)).empty());
  CHECK(mediated_component_note(sibling_model(find_preset("fig1b").parameters)).empty());

  const auto c = mediated_component_note(sibling_model(find_preset("fig1c").parameters));
  REQUIRE(c.size() == 1);
  CHECK(c[0].path == std::vector<std::string>{"T1", "T2", "Y2"});
  CHECK(c[0].symbolic_product == "phi*delta");
  CHECK(c[0].coefficient_product == doctest::Approx(0.3));

  const auto b = mediated_component_note(sibling_model(find_preset("fig2b").parameters));
  REQUIRE(b.size() == 1);
  CHECK(b[0].path == std::vector<std::string>{"T2", "T1", "Y1"});
  CHECK(b[0].symbolic_product == "tau*delta");
}
