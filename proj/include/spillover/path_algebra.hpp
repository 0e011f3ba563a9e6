#pragma once

// Population moments implied by a linear path model, computed two ways
// (reduced-form matrix algebra and explicit trek tracing), and the
// population gain-score regression they imply.

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "spillover/sem_graph.hpp"

namespace spillover {

enum class MomentMethod { matrix, trek };

struct ImpliedMoments {
  std::vector<std::string> variable_order;
  Eigen::MatrixXd covariance;
  MomentMethod method = MomentMethod::matrix;

  std::size_t index_of(std::string_view name) const;
  double cov(std::string_view a, std::string_view b) const;
  double variance(std::string_view a) const { return cov(a, a); }
  double corr(std::string_view a, std::string_view b) const;
};

/// Reduced form x = (I - B)^-1 e. Throws SingularityError if I - B is
/// numerically singular.
ImpliedMoments implied_covariance_matrix(const PathModel& model);

/// Sum over treks: Cov(i, j) = sum_s omega_s * P(s ~> i) * P(s ~> j), with
/// P the sum of coefficient products over directed paths.
ImpliedMoments implied_covariance_treks(const PathModel& model);

/// Covariance of x and y after partialling out `given`.
double conditional_covariance(const ImpliedMoments& moments, std::string_view x,
                              std::string_view y, const std::set<std::string>& given);
double partial_correlation(const ImpliedMoments& moments, std::string_view x, std::string_view y,
                           const std::set<std::string>& given);

struct PopulationRegression {
  double b1 = 0.0;
  double b2 = 0.0;
  double sc = 0.0;
};

/// Two-regressor partial regression of `outcome` on (first, second) from
/// correlations and standard deviations. Throws DegenerateExposureError or
/// CollinearityError.
PopulationRegression population_partial_regression(const ImpliedMoments& moments,
                                                   std::string_view outcome = "D",
                                                   std::string_view first = "T1",
                                                   std::string_view second = "T2");
PopulationRegression population_partial_regression(const PathModel& model);

namespace rng {
class Stream;
}

/// Replaces every structural coefficient with a draw from
/// [-hi, -lo] U [lo, hi]. Edges that share a label share one draw. When
/// `noise_range` is positive, non-derived noise variances are redrawn from
/// [1/noise_range, noise_range].
ModelSpec draw_coefficients(const ModelSpec& spec, rng::Stream& stream, double lo = 0.1,
                            double hi = 2.0, double noise_range = 0.0);

struct CoefficientCheck {
  std::string coefficient;   // "b1", "b2" or "sc"
  std::string expected_form; // e.g. "theta-delta"; "!= theta" for biased presets
  double max_abs_error = 0.0;
  double fraction_biased = 0.0; // only meaningful for "!= theta"
  bool passed = false;
};

struct SymbolicVerdict {
  std::string preset;
  int draws = 0;
  std::vector<CoefficientCheck> checks;
  bool passed() const;
};

inline constexpr double kSymbolicTolerance = 1e-9;
inline constexpr double kMethodAgreementTolerance = 1e-12;

/// Draws the preset's active structural parameters uniformly from
/// [-2, -0.1] U [0.1, 2] and noise variances from [0.5, 2], then compares the
/// population coefficients with the closed forms.
SymbolicVerdict symbolic_check(std::string_view preset, int draws = 100,
                               std::uint64_t seed = 0x5eed);

} // namespace spillover
