#pragma once

// What the spillover coefficient identifies in a given model, and what a
// sign assumption on the reverse spillover lets one conclude about theta.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "spillover/sem_graph.hpp"

namespace spillover {

enum class IdentificationClass {
  point_identifies_theta,
  identifies_theta_minus_kappa,
  biased,
  /// Neither identity holds on every draw, yet fewer than 95% of draws
  /// show a bias.
  inconclusive,
};

std::string_view to_string(IdentificationClass cls);

struct IdentificationEvidence {
  int draws = 0;
  double max_abs_sc_minus_theta = 0.0;
  double max_abs_sc_minus_theta_minus_kappa = 0.0;
  double fraction_biased = 0.0; // share of draws with |sc - theta| > 1e-6
};

struct IdentificationVerdict {
  IdentificationClass cls = IdentificationClass::inconclusive;
  /// At the model's own coefficients.
  double population_sc = 0.0;
  double theta_true = 0.0;
  double kappa_true = 0.0;
  IdentificationEvidence evidence;
};

/// Theta is the T1 -> Y2 coefficient and kappa the T2 -> Y1 coefficient,
/// by position. Draws resample every structural coefficient from
/// [-2, -0.1] U [0.1, 2] (edges sharing a label share a draw).
IdentificationVerdict classify_identification(const PathModel& model, int draws = 200,
                                              std::uint64_t seed = 0x1de7);

enum class SignAssumption { positive, negative, zero, unknown };

std::string_view to_string(SignAssumption sign);
SignAssumption sign_assumption_from_string(std::string_view text);

enum class BoundConclusion {
  sc_lower_bounds_theta,
  sc_upper_bounds_theta,
  sc_equals_theta,
  theta_positive,
  theta_negative,
  uninformative,
};

std::string_view to_string(BoundConclusion conclusion);

struct BoundStatement {
  SignAssumption assumption = SignAssumption::unknown;
  double sc_value = 0.0;
  std::vector<BoundConclusion> conclusions;
};

/// With two-sided spillover SC = theta - kappa, so the sign of kappa
/// orders SC against theta.
BoundStatement bound_inference(double sc_value, SignAssumption kappa_sign);

struct MediatedPathNote {
  std::vector<std::string> path; // e.g. {"T1", "T2", "Y2"}
  std::string symbolic_product;  // e.g. "phi*delta"
  double coefficient_product = 0.0;
  std::string message;
};

/// Spillover routes through the other sibling's exposure, which the
/// regression holds fixed and therefore excludes from SC.
std::vector<MediatedPathNote> mediated_component_note(const PathModel& model);

/// Swaps sibling indices 1 and 2 (T1 <-> T2, Y1 <-> Y2). The gain score is
/// redefined as the new Y2 - Y1.
ModelSpec swap_siblings(const ModelSpec& spec);

} // namespace spillover
