#pragma once

// Gain-score regression on sibling pairs: D = Y2 - Y1 regressed on an
// intercept, both exposures and (optionally) pair-level covariates; the
// spillover coefficient is the linear contrast b1 + b2.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace spillover {

/// One sibling pair. Covariates belong to the pair (entered for sibling 2).
struct PairRow {
  std::string family_id;
  double t1 = 0.0;
  double t2 = 0.0;
  double y1 = 0.0;
  double y2 = 0.0;
  std::vector<double> covariates;
};

struct PairDataset {
  std::vector<PairRow> rows;
  std::vector<std::string> covariate_names;

  std::size_t size() const { return rows.size(); }
  bool empty() const { return rows.empty(); }
};

/// Throws InvalidDataError on non-finite values, duplicate family ids or a
/// covariate vector whose length disagrees with covariate_names.
void validate_dataset(const PairDataset& data);

enum class CovarianceType { classical, hc1 };

struct FitOptions {
  bool adjust_covariates = false;
  CovarianceType covariance = CovarianceType::classical;
};

struct RegressionFit {
  std::vector<std::string> coefficient_names; // "_cons", "T1", "T2", covariates...
  Eigen::VectorXd coefficients;
  Eigen::MatrixXd coef_covariance;
  double residual_variance = 0.0;
  long df_residual = 0;
  std::size_t n = 0;
  CovarianceType covariance_type = CovarianceType::classical;

  std::size_t index_of(const std::string& name) const;
};

struct ContrastEstimate {
  double estimate = 0.0;
  double se = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double confidence_level = 0.95;
};

struct SpilloverReport {
  ContrastEstimate sc;
  ContrastEstimate b1;
  ContrastEstimate b2;
  double confidence_level = 0.95;
  std::size_t n = 0;
  long df_residual = 0;
  bool adjusted = false;
  CovarianceType covariance_type = CovarianceType::classical;
};

/// y2 - y1 per row. Throws EmptyDataError.
std::vector<double> gain_scores(const PairDataset& data);

/// OLS by Householder QR. Throws EmptyDataError, InsufficientDataError
/// (n <= number of coefficients) or RankDeficiencyError (smallest |R_ii|
/// below 1e-10 of the largest).
RegressionFit fit_gain_score(const PairDataset& data, const FitOptions& options = {});

/// wᵀb with se = sqrt(wᵀ V w) and a t(df) interval. Throws
/// DimensionMismatchError or PreconditionError for a level outside (0, 1).
ContrastEstimate linear_contrast(const RegressionFit& fit, std::span<const double> weights,
                                 double confidence_level = 0.95);

SpilloverReport spillover_estimate(const PairDataset& data, const FitOptions& options = {},
                                   double confidence_level = 0.95);

/// Quantile of Student's t with `df` degrees of freedom.
double student_t_quantile(double df, double probability);

inline constexpr double kRankTolerance = 1e-10;

} // namespace spillover
