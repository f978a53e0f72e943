#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <stdexcept>

namespace cc {

// One row of the published optimal-quantile table: the variance-minimizing
// quantile level q*, the asymptotic variance factor V, and the q*-quantile
// W of the standard law |S(alpha, 1, 1)|.
struct OqEntry {
  double alpha;
  double q_star;
  double var_factor;
  double w_qstar;
};

struct NoEntry : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The 30 published rows, exactly as printed. Two W values disagree with the
// Monte Carlo oracle: alpha = 0.95 (1.174773, off by roughly 10x against its
// neighbors' trend) and alpha = 0.3 (0.11484008, a digit transposition of the
// oracle's 0.14840). Both are kept verbatim; the oracle reports discrepancies
// instead of patching them.
std::span<const OqEntry> optimal_quantile_table();

// Exact-match lookup (tolerance 1e-9); throws NoEntry otherwise. The window
// alpha in (0.989, 1.011) has no rows. No interpolation: V spans three
// orders of magnitude near alpha = 1.
const OqEntry& lookup(double alpha);

// Sorted Monte Carlo sample of |S(alpha, 1, 1)|, standing in for the
// density / CDF / inverse CDF of the standard law, none of which have
// closed forms.
struct EmpiricalDistribution {
  Eigen::VectorXd samples;  // sorted ascending, all >= 0
  double alpha;

  // Order statistic at rank ceil(q * n).
  double quantile(double q) const;
};

EmpiricalDistribution build_empirical(double alpha, std::int64_t n,
                                      std::uint64_t seed);

// W_q = q-quantile of the empirical standard law.
double derive_wq(const EmpiricalDistribution& dist, double q);

// Simulates `trials` independent k-sample quantile estimates of a unit-scale
// law and returns k * Var(F_hat): a density-free estimate of the asymptotic
// variance factor. The trial samples depend on (alpha, k, trials, seed) only,
// so factors at different q are directly comparable.
double derive_variance_factor(double alpha, double q, int k, int trials,
                              std::uint64_t seed);
double derive_variance_factor(const EmpiricalDistribution& dist, double q,
                              int k, int trials, std::uint64_t seed);

struct QStarResult {
  double q_star;
  double var_factor;
};

// Grid scan of the simulated variance factor over q, then a refined scan
// around the grid minimum.
QStarResult derive_qstar(double alpha, double grid_step, int k, int trials,
                         std::uint64_t seed);

}  // namespace cc
