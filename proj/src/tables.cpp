#include "cc/tables.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "cc/parallel.hpp"
#include "cc/rng.hpp"
#include "cc/stable.hpp"

namespace cc {

namespace {

constexpr OqEntry kTable[] = {
    {0.20, 0.180, 1.39003806, 0.05561700},
    {0.30, 0.167, 1.21559359, 0.11484008},
    {0.40, 0.151, 1.00047427, 0.2720723},
    {0.50, 0.137, 0.76653704, 0.4522449},
    {0.60, 0.127, 0.53479789, 0.7406894},
    {0.70, 0.116, 0.32478420, 1.231919},
    {0.80, 0.108, 0.15465894, 2.256365},
    {0.85, 0.104, 0.08982992, 3.296870},
    {0.90, 0.101, 0.04116676, 5.400842},
    {0.95, 0.098, 0.01059831, 1.174773},
    {0.96, 0.097, 0.006821834, 14.92508},
    {0.97, 0.096, 0.003859153, 20.22440},
    {0.98, 0.0944, 0.001724739, 30.82616},
    {0.989, 0.0941, 0.0005243589, 56.86694},
    {1.011, 0.8904, 0.0005554749, 58.83961},
    {1.02, 0.8799, 0.001901498, 32.76892},
    {1.03, 0.869, 0.004424189, 22.13097},
    {1.04, 0.861, 0.008099329, 16.80970},
    {1.05, 0.855, 0.01298757, 13.61799},
    {1.10, 0.827, 0.05717725, 7.206345},
    {1.15, 0.810, 0.1365222, 5.070801},
    {1.20, 0.799, 0.2516604, 4.011459},
    {1.30, 0.784, 0.5808422, 2.962799},
    {1.40, 0.779, 1.0133272, 2.468643},
    {1.50, 0.778, 1.502868, 2.191925},
    {1.60, 0.785, 1.997239, 2.048035},
    {1.70, 0.794, 2.444836, 1.968536},
    {1.80, 0.806, 2.798748, 1.937256},
    {1.90, 0.828, 3.019045, 1.976624},
    {2.00, 0.862, 3.066164, 2.097626},
};

// Sample-size defaults sized so Monte Carlo standard error stays below half
// of the tolerances the oracles are checked against.
constexpr std::int64_t kDefaultWqSamples = 10'000'000;

Eigen::Index rank_index(double q, Eigen::Index n) {
  const auto rank =
      static_cast<Eigen::Index>(std::ceil(q * static_cast<double>(n)));
  return std::clamp<Eigen::Index>(rank, 1, n) - 1;
}

}  // namespace

std::span<const OqEntry> optimal_quantile_table() { return kTable; }

const OqEntry& lookup(double alpha) {
  for (const auto& row : kTable)
    if (std::abs(row.alpha - alpha) <= 1e-9) return row;
  throw NoEntry("no optimal-quantile table entry for alpha = " +
                std::to_string(alpha));
}

double EmpiricalDistribution::quantile(double q) const {
  if (!(q > 0.0) || !(q < 1.0))
    throw std::invalid_argument("q must lie in (0,1)");
  return samples[rank_index(q, samples.size())];
}

EmpiricalDistribution build_empirical(double alpha, std::int64_t n,
                                      std::uint64_t seed) {
  if (n < 100'000) throw std::invalid_argument("need n >= 1e5 samples");
  const StableSampler sampler(alpha, 1.0);
  EmpiricalDistribution dist{Eigen::VectorXd(n), alpha};
  SeededGenerator gen(seed);
  for (std::int64_t i = 0; i < n; ++i)
    dist.samples[i] = std::abs(sampler(gen));
  std::sort(dist.samples.data(), dist.samples.data() + n);
  return dist;
}

double derive_wq(const EmpiricalDistribution& dist, double q) {
  return dist.quantile(q);
}

namespace {

// Simulated k-sample quantile estimates at several q levels sharing one set
// of trials. Returns k * Var((Q_q / W_q)^alpha) per level; per-trial results
// are stored by index, so the reduction is scheduling-independent.
std::vector<double> simulate_factors(const EmpiricalDistribution& dist,
                                     const std::vector<double>& qs, int k,
                                     int trials, std::uint64_t seed) {
  const StableSampler sampler(dist.alpha, 1.0);
  const std::size_t nq = qs.size();
  std::vector<double> wq(nq);
  std::vector<Eigen::Index> ranks(nq);
  for (std::size_t m = 0; m < nq; ++m) {
    wq[m] = dist.quantile(qs[m]);
    ranks[m] = rank_index(qs[m], k);
  }
  std::vector<double> est(static_cast<std::size_t>(trials) * nq);
  parallel_for(trials, [&](std::int64_t t) {
    SeededGenerator gen(trial_seed(seed, static_cast<std::uint64_t>(t)));
    std::vector<double> x(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) x[static_cast<std::size_t>(j)] = std::abs(sampler(gen));
    std::sort(x.begin(), x.end());
    for (std::size_t m = 0; m < nq; ++m)
      est[static_cast<std::size_t>(t) * nq + m] =
          std::pow(x[static_cast<std::size_t>(ranks[m])] / wq[m], dist.alpha);
  });
  std::vector<double> factors(nq);
  for (std::size_t m = 0; m < nq; ++m) {
    double sum = 0.0;
    for (int t = 0; t < trials; ++t) sum += est[static_cast<std::size_t>(t) * nq + m];
    const double mean = sum / trials;
    double ss = 0.0;
    for (int t = 0; t < trials; ++t) {
      const double d = est[static_cast<std::size_t>(t) * nq + m] - mean;
      ss += d * d;
    }
    factors[m] = static_cast<double>(k) * ss / (trials - 1);
  }
  return factors;
}

}  // namespace

double derive_variance_factor(const EmpiricalDistribution& dist, double q,
                              int k, int trials, std::uint64_t seed) {
  if (k < 100) throw std::invalid_argument("need k >= 100");
  if (trials < 1000) throw std::invalid_argument("need trials >= 1e3");
  if (!(q > 0.0) || !(q < 1.0))
    throw std::invalid_argument("q must lie in (0,1)");
  return simulate_factors(dist, {q}, k, trials, seed)[0];
}

double derive_variance_factor(double alpha, double q, int k, int trials,
                              std::uint64_t seed) {
  const auto dist = build_empirical(alpha, kDefaultWqSamples, mix64(seed));
  return derive_variance_factor(dist, q, k, trials, seed);
}

QStarResult derive_qstar(double alpha, double grid_step, int k, int trials,
                         std::uint64_t seed) {
  if (!(grid_step > 0.0) || grid_step > 0.01)
    throw std::invalid_argument("grid_step must lie in (0, 0.01]");
  if (k < 100) throw std::invalid_argument("need k >= 100");
  if (trials < 1000) throw std::invalid_argument("need trials >= 1e3");
  const auto dist = build_empirical(alpha, kDefaultWqSamples, mix64(seed));

  std::vector<double> qs;
  for (double q = grid_step; q < 1.0 - grid_step / 2.0; q += grid_step)
    qs.push_back(q);
  auto factors = simulate_factors(dist, qs, k, trials, seed);
  std::size_t best = static_cast<std::size_t>(
      std::min_element(factors.begin(), factors.end()) - factors.begin());

  // Refined pass around the grid minimum, same trial samples.
  const double lo = std::max(grid_step / 10.0, qs[best] - grid_step);
  const double hi = std::min(1.0 - grid_step / 10.0, qs[best] + grid_step);
  std::vector<double> fine;
  for (double q = lo; q <= hi + 1e-12; q += grid_step / 10.0) fine.push_back(q);
  auto fine_factors = simulate_factors(dist, fine, k, trials, seed);
  best = static_cast<std::size_t>(
      std::min_element(fine_factors.begin(), fine_factors.end()) -
      fine_factors.begin());
  return {fine[best], fine_factors[best]};
}

}  // namespace cc
