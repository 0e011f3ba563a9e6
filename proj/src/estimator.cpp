#include "spillover/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include "spillover/error.hpp"

namespace spillover {

void validate_dataset(const PairDataset& data) {
  std::unordered_set<std::string> ids;
  ids.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& r = data.rows[i];
    if (!ids.insert(r.family_id).second)
      throw InvalidDataError(fmt::format("duplicate family_id '{}' (row {})", r.family_id, i + 1));
    if (!std::isfinite(r.t1) || !std::isfinite(r.t2) || !std::isfinite(r.y1) || !std::isfinite(r.y2))
      throw InvalidDataError(fmt::format("non-finite value in row {} (family '{}')", i + 1, r.family_id));
    if (r.covariates.size() != data.covariate_names.size())
      throw InvalidDataError(fmt::format("row {} has {} covariates, expected {}", i + 1,
                                         r.covariates.size(), data.covariate_names.size()));
    for (double c : r.covariates)
      if (!std::isfinite(c))
        throw InvalidDataError(fmt::format("non-finite covariate in row {}", i + 1));
  }
}

std::size_t RegressionFit::index_of(const std::string& name) const {
  auto it = std::find(coefficient_names.begin(), coefficient_names.end(), name);
  if (it == coefficient_names.end())
    throw DimensionMismatchError(fmt::format("fit has no coefficient '{}'", name));
  return static_cast<std::size_t>(it - coefficient_names.begin());
}

std::vector<double> gain_scores(const PairDataset& data) {
  if (data.empty()) throw EmptyDataError("dataset has no rows");
  std::vector<double> d;
  d.reserve(data.size());
  for (const auto& r : data.rows) d.push_back(r.y2 - r.y1);
  return d;
}

RegressionFit fit_gain_score(const PairDataset& data, const FitOptions& options) {
  if (data.empty()) throw EmptyDataError("dataset has no rows");
  const std::size_t covariates = options.adjust_covariates ? data.covariate_names.size() : 0;
  if (options.adjust_covariates && covariates == 0)
    throw InvalidDataError("covariate adjustment requested but the dataset has no cov_* columns");

  const auto n = static_cast<Eigen::Index>(data.size());
  const auto p = static_cast<Eigen::Index>(3 + covariates);
  if (n <= p)
    throw InsufficientDataError(
        fmt::format("{} pairs cannot identify {} coefficients with positive residual df", n, p));

  Eigen::MatrixXd X(n, p);
  Eigen::VectorXd d(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = data.rows[static_cast<std::size_t>(i)];
    X(i, 0) = 1.0;
    X(i, 1) = r.t1;
    X(i, 2) = r.t2;
    for (std::size_t c = 0; c < covariates; ++c) X(i, 3 + static_cast<Eigen::Index>(c)) = r.covariates.at(c);
    d(i) = r.y2 - r.y1;
  }

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(X);
  const Eigen::MatrixXd R = qr.matrixQR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
  const Eigen::VectorXd diag = R.diagonal().cwiseAbs();
  if (!(diag.minCoeff() >= kRankTolerance * diag.maxCoeff()))
    throw RankDeficiencyError(fmt::format(
        "design matrix is rank deficient (min |R_ii| / max |R_ii| = {:.3g}); check for "
        "concordant or constant exposures",
        diag.maxCoeff() > 0 ? diag.minCoeff() / diag.maxCoeff() : 0.0));

  RegressionFit fit;
  fit.coefficient_names = {"_cons", "T1", "T2"};
  for (std::size_t c = 0; c < covariates; ++c) fit.coefficient_names.push_back(data.covariate_names[c]);
  fit.coefficients = qr.solve(d);
  fit.n = data.size();
  fit.df_residual = static_cast<long>(n - p);
  fit.covariance_type = options.covariance;

  const Eigen::VectorXd resid = d - X * fit.coefficients;
  fit.residual_variance = resid.squaredNorm() / static_cast<double>(fit.df_residual);

  const Eigen::MatrixXd r_inv =
      R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
  const Eigen::MatrixXd bread = r_inv * r_inv.transpose(); // (XᵀX)^-1
  if (options.covariance == CovarianceType::classical) {
    fit.coef_covariance = fit.residual_variance * bread;
  } else {
    const Eigen::MatrixXd meat = X.transpose() * resid.array().square().matrix().asDiagonal() * X;
    const double scale = static_cast<double>(n) / static_cast<double>(fit.df_residual);
    fit.coef_covariance = scale * bread * meat * bread;
  }
  return fit;
}

double student_t_quantile(double df, double probability) {
  boost::math::students_t dist(df);
  return boost::math::quantile(dist, probability);
}

ContrastEstimate linear_contrast(const RegressionFit& fit, std::span<const double> weights,
                                 double confidence_level) {
  const auto p = fit.coefficients.size();
  if (static_cast<Eigen::Index>(weights.size()) != p)
    throw DimensionMismatchError(
        fmt::format("contrast has {} weights but the fit has {} coefficients", weights.size(), p));
  if (!(confidence_level > 0.0 && confidence_level < 1.0))
    throw PreconditionError(fmt::format("confidence level {} is not in (0, 1)", confidence_level));

  const Eigen::Map<const Eigen::VectorXd> w(weights.data(), p);
  ContrastEstimate c;
  c.confidence_level = confidence_level;
  c.estimate = w.dot(fit.coefficients);
  c.se = std::sqrt(std::max(0.0, w.dot(fit.coef_covariance * w)));
  const double t = student_t_quantile(static_cast<double>(fit.df_residual), (1.0 + confidence_level) / 2.0);
  c.ci_low = c.estimate - t * c.se;
  c.ci_high = c.estimate + t * c.se;
  return c;
}

SpilloverReport spillover_estimate(const PairDataset& data, const FitOptions& options,
                                   double confidence_level) {
  const auto fit = fit_gain_score(data, options);
  std::vector<double> w(static_cast<std::size_t>(fit.coefficients.size()), 0.0);

  SpilloverReport report;
  report.confidence_level = confidence_level;
  report.n = fit.n;
  report.df_residual = fit.df_residual;
  report.adjusted = options.adjust_covariates;
  report.covariance_type = options.covariance;

  w[1] = 1.0;
  w[2] = 1.0;
  report.sc = linear_contrast(fit, w, confidence_level);
  w[2] = 0.0;
  report.b1 = linear_contrast(fit, w, confidence_level);
  w[1] = 0.0;
  w[2] = 1.0;
  report.b2 = linear_contrast(fit, w, confidence_level);
  return report;
}

} // namespace spillover
