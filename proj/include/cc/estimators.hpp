#pragma once

#include <Eigen/Core>
#include <string>

namespace cc {

struct EstimatorKind {
  enum class Tag {
    GeometricMean,
    HarmonicMean,
    Mle05,
    OptimalPower,
    Quantile,
    OptimalQuantile,
  };
  Tag tag;
  double q = 0.0;    // Quantile only
  double w_q = 0.0;  // Quantile only

  static EstimatorKind gm() { return {Tag::GeometricMean}; }
  static EstimatorKind hm() { return {Tag::HarmonicMean}; }
  static EstimatorKind mle05() { return {Tag::Mle05}; }
  static EstimatorKind op() { return {Tag::OptimalPower}; }
  static EstimatorKind quantile(double q, double w_q) {
    return {Tag::Quantile, q, w_q};
  }
  static EstimatorKind oq() { return {Tag::OptimalQuantile}; }

  std::string name() const;
};

struct EstimateResult {
  double value;        // F_hat >= 0
  EstimatorKind kind;
  Eigen::Index k;      // sample count used
};

// kappa(alpha): alpha below 1, 2 - alpha above 1.
double kappa(double alpha);

// log E|x|^{z*alpha} for x ~ S(alpha, 1, 1). Valid for z < 1 and, when
// alpha > 1, z*alpha > -1 (the |x| tail kills higher negative moments).
double log_unit_moment(double z, double alpha);

// Normalizing constant of the geometric mean estimator for (alpha, k);
// depends on nothing else, so callers can hoist it across trials.
double gm_denominator(double alpha, int k);
double gm_log_denominator(double alpha, int k);

EstimateResult estimate_gm(const Eigen::VectorXd& counters, double alpha);
EstimateResult estimate_hm(const Eigen::VectorXd& counters, double alpha);
EstimateResult estimate_mle05(const Eigen::VectorXd& counters);

// Asymptotic variance factor of the lambda-power estimator.
double g_function(double lambda, double alpha);

// argmin of g(.; alpha); memoized. Throws if the minimum is not bracketed
// inside the finite-moment domain (this happens at alpha = 2, where the
// formal optimum lambda = 1 lies outside it).
double optimal_lambda(double alpha);

EstimateResult estimate_op(const Eigen::VectorXd& counters, double alpha,
                           double lambda);

EstimateResult estimate_quantile(const Eigen::VectorXd& counters, double alpha,
                                 double q, double w_q);
EstimateResult estimate_oq(const Eigen::VectorXd& counters, double alpha);

// Dispatch on kind; OptimalPower uses optimal_lambda(alpha).
EstimateResult estimate(const EstimatorKind& kind,
                        const Eigen::VectorXd& counters, double alpha);

// Throws std::invalid_argument when kind is not usable at this alpha.
void validate_kind(const EstimatorKind& kind, double alpha);

// The V in Var(F_hat) = V F^2 / k + O(1/k^2).
double variance_factor(const EstimatorKind& kind, double alpha);

// Order statistic at rank ceil(q*n), 1-based; no interpolation.
double sample_quantile(Eigen::VectorXd values, double q);

}  // namespace cc
