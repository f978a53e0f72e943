#pragma once

#include <cstdint>

#include "cc/rng.hpp"

namespace cc {

// Parameters of a stable law S(alpha, beta, scale). The scale parameter
// follows the convention in which a weighted sum sum_i w_i * s_i of unit
// samples, w_i >= 0, is distributed as S(alpha, beta, sum_i w_i^alpha):
// scale enters quantiles as scale^(1/alpha).
struct StableParams {
  double alpha;
  double beta = 1.0;  // maximally skewed by default
  double scale = 1.0;

  // Throws std::invalid_argument on out-of-range or alpha == 1.
  void validate() const;
};

// Chambers-Mallows-Stuck transform with the per-(alpha, beta) constants
// hoisted out; the bulk path for Monte Carlo loops and sketch updates.
class StableSampler {
 public:
  StableSampler(double alpha, double beta = 1.0);

  // One draw of S(alpha, beta, 1) from u in (0,1) and e > 0 (exp, mean 1).
  double operator()(double u, double e) const;

  // Next draw from the generator stream (consumes two positions).
  double operator()(SeededGenerator& gen) const;

  double alpha() const { return alpha_; }

 private:
  double alpha_, beta_;
  double b0_, s0_, inv_alpha_, exp_ratio_;
};

// One draw of S(alpha, beta, 1) from a uniform variate u in (0,1) and an
// exponential variate e (mean 1), via the Chambers-Mallows-Stuck transform.
// Deterministic in its inputs; alpha == 1 is rejected.
double sample_standard(double alpha, double beta, double u, double e);

// Convenience: draws (u, e) from the generator (two positions per sample).
double sample_standard(SeededGenerator& gen, double alpha, double beta = 1.0);

// Maps a standard variate to scale `scale`: scale^(1/alpha) * sample_std.
double scale_to(double sample_std, double scale, double alpha);

// Entry r_ij ~ S(alpha, 1, 1) of the implicit projection matrix, a pure
// function of (seed, i, j, alpha). The matrix is never materialized.
double projection_entry(const StableSampler& sampler, std::uint64_t seed,
                        std::uint64_t i, std::uint64_t j);
double projection_entry(std::uint64_t seed, std::uint64_t i, std::uint64_t j,
                        double alpha);

}  // namespace cc
