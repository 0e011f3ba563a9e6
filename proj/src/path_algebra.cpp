#include "spillover/path_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "spillover/error.hpp"
#include "spillover/random.hpp"

namespace spillover {

std::size_t ImpliedMoments::index_of(std::string_view name) const {
  auto it = std::find(variable_order.begin(), variable_order.end(), name);
  if (it == variable_order.end())
    throw UnknownVariableError(fmt::format("no moments for variable '{}'", name));
  return static_cast<std::size_t>(it - variable_order.begin());
}

double ImpliedMoments::cov(std::string_view a, std::string_view b) const {
  return covariance(static_cast<Eigen::Index>(index_of(a)), static_cast<Eigen::Index>(index_of(b)));
}

double ImpliedMoments::corr(std::string_view a, std::string_view b) const {
  return cov(a, b) / std::sqrt(variance(a) * variance(b));
}

namespace {

std::vector<std::string> names_of(const PathModel& model) {
  std::vector<std::string> names;
  for (const auto& v : model.variables()) names.push_back(v.name);
  return names;
}

} // namespace

ImpliedMoments implied_covariance_matrix(const PathModel& model) {
  const auto n = static_cast<Eigen::Index>(model.size());
  // B(child, parent) holds structural coefficients; derived variables get
  // their definition as a row of the loading matrix instead.
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd noise(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    noise(i) = model.variable(static_cast<std::size_t>(i)).noise_variance;
    for (const auto& link : model.parents(static_cast<std::size_t>(i)))
      if (!link.definitional) B(i, static_cast<Eigen::Index>(link.node)) = link.coefficient;
  }

  const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n) - B;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) throw SingularityError("I - B is numerically singular");
  const Eigen::MatrixXd reduced = lu.inverse();
  const Eigen::MatrixXd structural = reduced * noise.asDiagonal() * reduced.transpose();

  Eigen::MatrixXd loading = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!model.is_derived(static_cast<std::size_t>(i))) continue;
    loading(i, i) = 0.0;
    for (const auto& link : model.parents(static_cast<std::size_t>(i)))
      loading(i, static_cast<Eigen::Index>(link.node)) += link.coefficient;
  }

  ImpliedMoments m;
  m.variable_order = names_of(model);
  m.covariance = loading * structural * loading.transpose();
  m.method = MomentMethod::matrix;
  return m;
}

ImpliedMoments implied_covariance_treks(const PathModel& model) {
  const auto n = model.size();
  // reach[s][i] = sum over directed paths s ~> i of the coefficient product.
  std::vector<std::vector<double>> reach(n, std::vector<double>(n, 0.0));
  for (std::size_t s = 0; s < n; ++s) {
    auto walk = [&](auto&& self, std::size_t node, double product) -> void {
      reach[s][node] += product;
      for (const auto& link : model.children(node)) self(self, link.node, product * link.coefficient);
    };
    walk(walk, s, 1.0);
  }

  ImpliedMoments m;
  m.variable_order = names_of(model);
  m.method = MomentMethod::trek;
  const auto size = static_cast<Eigen::Index>(n);
  m.covariance = Eigen::MatrixXd::Zero(size, size);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double total = 0.0;
      for (std::size_t s = 0; s < n; ++s) {
        const double root_variance = model.variable(s).noise_variance;
        if (root_variance == 0.0) continue;
        total += root_variance * reach[s][i] * reach[s][j];
      }
      const auto a = static_cast<Eigen::Index>(i);
      const auto b = static_cast<Eigen::Index>(j);
      m.covariance(a, b) = total;
      m.covariance(b, a) = total;
    }
  }
  return m;
}

double conditional_covariance(const ImpliedMoments& moments, std::string_view x,
                              std::string_view y, const std::set<std::string>& given) {
  if (given.empty()) return moments.cov(x, y);
  const auto k = static_cast<Eigen::Index>(given.size());
  Eigen::MatrixXd s_gg(k, k);
  Eigen::VectorXd s_xg(k), s_yg(k);
  Eigen::Index r = 0;
  for (const auto& a : given) {
    Eigen::Index c = 0;
    for (const auto& b : given) s_gg(r, c++) = moments.cov(a, b);
    s_xg(r) = moments.cov(x, a);
    s_yg(r) = moments.cov(y, a);
    ++r;
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(s_gg);
  if (!lu.isInvertible()) throw SingularityError("conditioning set has a singular covariance");
  return moments.cov(x, y) - s_xg.dot(lu.solve(s_yg));
}

double partial_correlation(const ImpliedMoments& moments, std::string_view x, std::string_view y,
                           const std::set<std::string>& given) {
  const double xy = conditional_covariance(moments, x, y, given);
  const double xx = conditional_covariance(moments, x, x, given);
  const double yy = conditional_covariance(moments, y, y, given);
  if (xx <= 0.0 || yy <= 0.0) return 0.0;
  return xy / std::sqrt(xx * yy);
}

PopulationRegression population_partial_regression(const ImpliedMoments& moments,
                                                   std::string_view outcome,
                                                   std::string_view first,
                                                   std::string_view second) {
  const double var1 = moments.variance(first);
  const double var2 = moments.variance(second);
  if (!(var1 > 0.0) || !(var2 > 0.0))
    throw DegenerateExposureError(
        fmt::format("exposure variance is zero (Var({})={}, Var({})={})", first, var1, second, var2));
  const double sd1 = std::sqrt(var1);
  const double sd2 = std::sqrt(var2);
  const double rho12 = moments.cov(first, second) / (sd1 * sd2);
  if (std::abs(rho12) >= 1.0 - 1e-12)
    throw CollinearityError(fmt::format("|corr({}, {})| = {} is not below 1", first, second,
                                        std::abs(rho12)));

  PopulationRegression r;
  const double var_out = moments.variance(outcome);
  if (var_out > 0.0) {
    const double sd_out = std::sqrt(var_out);
    const double rho_o1 = moments.cov(outcome, first) / (sd_out * sd1);
    const double rho_o2 = moments.cov(outcome, second) / (sd_out * sd2);
    const double denom = 1.0 - rho12 * rho12;
    r.b1 = (rho_o1 - rho_o2 * rho12) / denom * sd_out / sd1;
    r.b2 = (rho_o2 - rho_o1 * rho12) / denom * sd_out / sd2;
  }
  r.sc = r.b1 + r.b2;
  return r;
}

PopulationRegression population_partial_regression(const PathModel& model) {
  return population_partial_regression(implied_covariance_matrix(model));
}

ModelSpec draw_coefficients(const ModelSpec& spec, rng::Stream& stream, double lo, double hi,
                            double noise_range) {
  ModelSpec out = spec;
  std::map<std::string, double> shared;
  auto draw = [&] {
    const double magnitude = stream.uniform(lo, hi);
    return stream.uniform() < 0.5 ? -magnitude : magnitude;
  };
  for (auto& e : out.edges) {
    if (e.label.empty()) {
      e.coefficient = draw();
      continue;
    }
    auto it = shared.find(e.label);
    if (it == shared.end()) it = shared.emplace(e.label, draw()).first;
    e.coefficient = it->second;
  }
  if (noise_range > 0.0) {
    for (auto& v : out.variables)
      if (v.kind != VariableKind::derived) v.noise_variance = stream.uniform(1.0 / noise_range, noise_range);
  }
  return out;
}

bool SymbolicVerdict::passed() const {
  return !checks.empty() &&
         std::all_of(checks.begin(), checks.end(), [](const CoefficientCheck& c) { return c.passed; });
}

namespace {

double labelled(const ModelSpec& spec, std::string_view label) {
  for (const auto& e : spec.edges)
    if (e.label == label) return e.coefficient;
  return 0.0;
}

} // namespace

SymbolicVerdict symbolic_check(std::string_view preset_name, int draws, std::uint64_t seed) {
  const Preset& preset = find_preset(preset_name);
  const ModelSpec base = sibling_model_spec(preset.parameters);
  rng::Stream stream(seed, rng::tag_of(preset.name));

  SymbolicVerdict verdict;
  verdict.preset = preset.name;
  verdict.draws = draws;

  double err_b1 = 0.0, err_b2 = 0.0;
  int biased = 0;
  for (int d = 0; d < draws; ++d) {
    const ModelSpec drawn = draw_coefficients(base, stream, 0.1, 2.0, 2.0);
    const auto reg = population_partial_regression(build_model(drawn));
    const double theta = labelled(drawn, "theta");
    const double delta = labelled(drawn, "delta");
    const double kappa = labelled(drawn, "kappa");
    err_b1 = std::max(err_b1, std::abs(reg.b1 - (theta - delta)));
    err_b2 = std::max(err_b2, std::abs(reg.b2 - (delta - kappa)));
    if (std::abs(reg.sc - theta) > 1e-6) ++biased;
  }

  switch (preset.family) {
  case PresetFamily::one_sided:
    verdict.checks.push_back({"b1", "theta-delta", err_b1, 0.0, err_b1 <= kSymbolicTolerance});
    verdict.checks.push_back({"b2", "delta", err_b2, 0.0, err_b2 <= kSymbolicTolerance});
    break;
  case PresetFamily::two_sided:
    verdict.checks.push_back({"b1", "theta-delta", err_b1, 0.0, err_b1 <= kSymbolicTolerance});
    verdict.checks.push_back({"b2", "delta-kappa", err_b2, 0.0, err_b2 <= kSymbolicTolerance});
    break;
  case PresetFamily::outcome_spillover: {
    const double fraction = draws > 0 ? static_cast<double>(biased) / draws : 0.0;
    verdict.checks.push_back({"sc", "!= theta", 0.0, fraction, fraction >= 0.95});
    break;
  }
  }
  return verdict;
}

} // namespace spillover
