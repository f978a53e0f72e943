#include "cc/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "cc/tables.hpp"

namespace cc {

namespace {
constexpr double kPi = std::numbers::pi;

void check_alpha(double alpha) {
  if (!(alpha > 0.0) || !(alpha <= 2.0) || alpha == 1.0)
    throw std::invalid_argument("alpha must lie in (0,1) or (1,2]");
}
}  // namespace

std::string EstimatorKind::name() const {
  switch (tag) {
    case Tag::GeometricMean: return "gm";
    case Tag::HarmonicMean: return "hm";
    case Tag::Mle05: return "mle";
    case Tag::OptimalPower: return "op";
    case Tag::Quantile: return "quantile";
    case Tag::OptimalQuantile: return "oq";
  }
  return "?";
}

double kappa(double alpha) {
  check_alpha(alpha);
  return alpha < 1.0 ? alpha : 2.0 - alpha;
}

double log_unit_moment(double z, double alpha) {
  check_alpha(alpha);
  if (!(z < 1.0)) throw std::domain_error("moment exponent z must be < 1");
  if (alpha > 1.0 && !(z * alpha > -1.0))
    throw std::domain_error("E|x|^(z*alpha) diverges for z*alpha <= -1 when alpha > 1");
  const double kap = kappa(alpha);
  const double za = z * alpha;
  if (za < 1.0) {
    // Gamma(z*alpha)*sin(pi*z*alpha/2) folded through the reflection formula;
    // this branch stays pole-free for arbitrarily negative z (alpha < 1 needs
    // that: the optimal power exponent diverges as alpha -> 1-).
    double log_bracket = 0.0;
    if (alpha > 1.0)
      log_bracket = std::log(std::cos(kap * z * kPi / 2.0)) -
                    std::log(std::cos(za * kPi / 2.0));
    return log_bracket - z * std::log(std::cos(kap * kPi / 2.0)) +
           std::lgamma(1.0 - z) - std::lgamma(1.0 - za);
  }
  // 1 <= z*alpha < alpha (only reachable for alpha > 1): the direct form is
  // pole-free here.
  return std::log(std::cos(kap * z * kPi / 2.0)) -
         z * std::log(std::cos(kap * kPi / 2.0)) + std::log(2.0 / kPi) +
         std::lgamma(1.0 - z) + std::lgamma(za) +
         std::log(std::sin(kPi * za / 2.0));
}

double gm_log_denominator(double alpha, int k) {
  check_alpha(alpha);
  if (k < 2) throw std::invalid_argument("geometric mean requires k >= 2");
  const double kap = kappa(alpha);
  const double kd = static_cast<double>(k);
  return kd * std::log(std::cos(kap * kPi / (2.0 * kd))) -
         std::log(std::cos(kap * kPi / 2.0)) +
         kd * (std::log(2.0 / kPi) + std::log(std::sin(kPi * alpha / (2.0 * kd))) +
               std::lgamma(1.0 - 1.0 / kd) + std::lgamma(alpha / kd));
}

double gm_denominator(double alpha, int k) {
  return std::exp(gm_log_denominator(alpha, k));
}

EstimateResult estimate_gm(const Eigen::VectorXd& counters, double alpha) {
  const Eigen::Index k = counters.size();
  if (k < 2) throw std::invalid_argument("geometric mean requires k >= 2");
  double log_prod = 0.0;
  for (Eigen::Index j = 0; j < k; ++j)
    log_prod += std::log(std::abs(counters[j]));  // -inf on a zero counter -> estimate 0
  const double v = std::exp(alpha / static_cast<double>(k) * log_prod -
                            gm_log_denominator(alpha, static_cast<int>(k)));
  return {v, EstimatorKind::gm(), k};
}

EstimateResult estimate_hm(const Eigen::VectorXd& counters, double alpha) {
  check_alpha(alpha);
  if (!(alpha < 1.0))
    throw std::invalid_argument("harmonic mean estimator requires alpha < 1");
  const Eigen::Index k = counters.size();
  if (k < 1) throw std::invalid_argument("empty counter vector");
  double denom = 0.0;
  for (Eigen::Index j = 0; j < k; ++j) {
    if (!(counters[j] > 0.0))
      throw std::invalid_argument(
          "nonpositive counter: not distributed as a maximally skewed "
          "stable law with alpha < 1 (sketch/parameter mismatch?)");
    denom += std::pow(counters[j], -alpha);
  }
  const double kd = static_cast<double>(k);
  const double g1a = std::tgamma(1.0 + alpha);
  const double hm_var = 2.0 * g1a * g1a / std::tgamma(1.0 + 2.0 * alpha) - 1.0;
  const double v = kd * std::cos(alpha * kPi / 2.0) / g1a / denom *
                   (1.0 - hm_var / kd);
  return {v, EstimatorKind::hm(), k};
}

EstimateResult estimate_mle05(const Eigen::VectorXd& counters) {
  const Eigen::Index k = counters.size();
  if (k < 1) throw std::invalid_argument("empty counter vector");
  double inv_sum = 0.0;
  for (Eigen::Index j = 0; j < k; ++j) {
    if (!(counters[j] > 0.0))
      throw std::invalid_argument("nonpositive counter in MLE (alpha = 0.5) input");
    inv_sum += 1.0 / counters[j];
  }
  const double kd = static_cast<double>(k);
  const double v = (1.0 - 0.75 / kd) * std::sqrt(kd / inv_sum);
  return {v, EstimatorKind::mle05(), k};
}

double g_function(double lambda, double alpha) {
  if (lambda == 0.0) throw std::domain_error("lambda must be nonzero");
  // E|x|^{2*lambda*alpha} finite <=> 2*lambda < 1, plus the alpha > 1 tail
  // condition checked inside log_unit_moment.
  const double delta =
      log_unit_moment(2.0 * lambda, alpha) - 2.0 * log_unit_moment(lambda, alpha);
  return std::expm1(delta) / (lambda * lambda);
}

namespace {

constexpr double kLambdaEps = 1e-3;

struct LambdaDomain {
  double lo, hi;
};

LambdaDomain lambda_domain(double alpha) {
  const double hi = 0.5 - kLambdaEps;
  if (alpha > 1.0) return {-0.5 / alpha + kLambdaEps, hi};
  // One-sided law for alpha < 1: all negative moments exist. The minimizer
  // runs off to -infinity as alpha -> 1-, roughly like -1.2/(1-alpha).
  return {std::min(-2.0, -3.0 / (1.0 - alpha)), hi};
}

double golden_section(double lo, double hi, double alpha) {
  constexpr double phi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - phi * (b - a);
  double x2 = a + phi * (b - a);
  double f1 = g_function(x1, alpha);
  double f2 = g_function(x2, alpha);
  while (b - a > 1e-6) {
    if (f1 < f2) {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - phi * (b - a);
      f1 = g_function(x1, alpha);
    } else {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + phi * (b - a);
      f2 = g_function(x2, alpha);
    }
  }
  return (a + b) / 2.0;
}

}  // namespace

double optimal_lambda(double alpha) {
  check_alpha(alpha);

  static std::mutex cache_mutex;
  static std::map<double, double> cache;
  {
    std::lock_guard<std::mutex> lock(cache_mutex);
    if (auto it = cache.find(alpha); it != cache.end()) return it->second;
  }

  const auto [lo, hi] = lambda_domain(alpha);
  constexpr double step = 1e-2;
  double best = 0.0, best_g = std::numeric_limits<double>::infinity();
  for (double l = lo; l <= hi; l += step) {
    if (std::abs(l) < kLambdaEps) continue;
    const double gl = g_function(l, alpha);
    if (gl < best_g) { best_g = gl; best = l; }
  }
  if (best - step <= lo || best + step >= hi)
    throw std::runtime_error(
        "optimal_lambda: minimum of g not bracketed inside the "
        "finite-moment domain at alpha = " + std::to_string(alpha));
  double a = best - step, b = best + step;
  if (a < 0.0 && b > 0.0) (best < 0.0 ? b : a) = (best < 0.0 ? -kLambdaEps : kLambdaEps);
  const double result = golden_section(a, b, alpha);

  std::lock_guard<std::mutex> lock(cache_mutex);
  cache.emplace(alpha, result);
  return result;
}

EstimateResult estimate_op(const Eigen::VectorXd& counters, double alpha,
                           double lambda) {
  check_alpha(alpha);
  const Eigen::Index k = counters.size();
  if (k < 1) throw std::invalid_argument("empty counter vector");
  const double la = lambda * alpha;
  double mean = 0.0;
  for (Eigen::Index j = 0; j < k; ++j) {
    const double ax = std::abs(counters[j]);
    if (alpha < 1.0 && !(counters[j] > 0.0))
      throw std::invalid_argument("nonpositive counter with alpha < 1");
    mean += std::pow(ax, la);
  }
  mean /= static_cast<double>(k);
  const double log_m1 = log_unit_moment(lambda, alpha);
  const double ratio_m1 = std::expm1(log_unit_moment(2.0 * lambda, alpha) -
                                     2.0 * log_m1);  // m(2l)/m(l)^2 - 1
  const double correction =
      1.0 - (1.0 / static_cast<double>(k)) * (0.5 / lambda) *
                (1.0 / lambda - 1.0) * ratio_m1;
  const double v =
      std::exp((std::log(mean) - log_m1) / lambda) * correction;
  return {v, EstimatorKind::op(), k};
}

double sample_quantile(Eigen::VectorXd values, double q) {
  if (!(q > 0.0) || !(q < 1.0)) throw std::invalid_argument("q must lie in (0,1)");
  const Eigen::Index n = values.size();
  if (n < 1) throw std::invalid_argument("empty sample");
  const auto rank = static_cast<Eigen::Index>(
      std::ceil(q * static_cast<double>(n)));
  const Eigen::Index idx = std::clamp<Eigen::Index>(rank, 1, n) - 1;
  std::nth_element(values.data(), values.data() + idx, values.data() + n);
  return values[idx];
}

EstimateResult estimate_quantile(const Eigen::VectorXd& counters, double alpha,
                                 double q, double w_q) {
  check_alpha(alpha);
  if (!(q > 0.0) || !(q < 1.0)) throw std::invalid_argument("q must lie in (0,1)");
  if (!(w_q > 0.0)) throw std::invalid_argument("w_q must be > 0");
  const Eigen::Index k = counters.size();
  const double need = 1.0 / std::min(q, 1.0 - q);
  if (static_cast<double>(k) < std::ceil(need))
    throw std::invalid_argument("k too small for quantile level q");
  const double quant = sample_quantile(counters.cwiseAbs(), q);
  return {std::pow(quant / w_q, alpha), EstimatorKind::quantile(q, w_q), k};
}

EstimateResult estimate_oq(const Eigen::VectorXd& counters, double alpha) {
  const OqEntry entry = lookup(alpha);  // throws NoEntry for untabulated alpha
  EstimateResult r = estimate_quantile(counters, alpha, entry.q_star, entry.w_qstar);
  r.kind = EstimatorKind::oq();
  return r;
}

void validate_kind(const EstimatorKind& kind, double alpha) {
  check_alpha(alpha);
  using Tag = EstimatorKind::Tag;
  switch (kind.tag) {
    case Tag::GeometricMean:
    case Tag::OptimalPower:
      return;
    case Tag::HarmonicMean:
      if (!(alpha < 1.0))
        throw std::invalid_argument("harmonic mean estimator requires alpha < 1");
      return;
    case Tag::Mle05:
      if (alpha != 0.5)
        throw std::invalid_argument("MLE estimator is for alpha = 0.5 only");
      return;
    case Tag::Quantile:
      if (!(kind.q > 0.0) || !(kind.q < 1.0) || !(kind.w_q > 0.0))
        throw std::invalid_argument("quantile estimator needs q in (0,1) and w_q > 0");
      return;
    case Tag::OptimalQuantile:
      lookup(alpha);
      return;
  }
}

EstimateResult estimate(const EstimatorKind& kind,
                        const Eigen::VectorXd& counters, double alpha) {
  using Tag = EstimatorKind::Tag;
  switch (kind.tag) {
    case Tag::GeometricMean: return estimate_gm(counters, alpha);
    case Tag::HarmonicMean: return estimate_hm(counters, alpha);
    case Tag::Mle05:
      if (alpha != 0.5)
        throw std::invalid_argument("MLE estimator is for alpha = 0.5 only");
      return estimate_mle05(counters);
    case Tag::OptimalPower:
      return estimate_op(counters, alpha, optimal_lambda(alpha));
    case Tag::Quantile: return estimate_quantile(counters, alpha, kind.q, kind.w_q);
    case Tag::OptimalQuantile: return estimate_oq(counters, alpha);
  }
  throw std::logic_error("unreachable");
}

double variance_factor(const EstimatorKind& kind, double alpha) {
  using Tag = EstimatorKind::Tag;
  switch (kind.tag) {
    case Tag::GeometricMean: {
      const double kap = kappa(alpha);
      return kPi * kPi / 12.0 * (alpha * alpha + 2.0 - 3.0 * kap * kap);
    }
    case Tag::HarmonicMean: {
      if (!(alpha < 1.0))
        throw std::invalid_argument("harmonic mean estimator requires alpha < 1");
      check_alpha(alpha);
      const double g1a = std::tgamma(1.0 + alpha);
      return 2.0 * g1a * g1a / std::tgamma(1.0 + 2.0 * alpha) - 1.0;
    }
    case Tag::Mle05:
      if (alpha != 0.5)
        throw std::invalid_argument("MLE estimator is for alpha = 0.5 only");
      return 0.5;
    case Tag::OptimalPower:
      return g_function(optimal_lambda(alpha), alpha);
    case Tag::Quantile:
      throw std::invalid_argument(
          "no closed-form variance factor for a generic quantile level; "
          "use tables::derive_variance_factor");
    case Tag::OptimalQuantile:
      return lookup(alpha).var_factor;
  }
  throw std::logic_error("unreachable");
}

}  // namespace cc
