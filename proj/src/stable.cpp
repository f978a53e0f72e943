#include "cc/stable.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cc {

namespace {
constexpr double kPi = std::numbers::pi;

void check_alpha_beta(double alpha, double beta) {
  if (!(alpha > 0.0) || !(alpha <= 2.0))
    throw std::invalid_argument("alpha must lie in (0,2]");
  if (alpha == 1.0)
    throw std::invalid_argument("alpha = 1 is excluded (use a plain counter)");
  if (!(beta >= -1.0) || !(beta <= 1.0))
    throw std::invalid_argument("beta must lie in [-1,1]");
}
}  // namespace

void StableParams::validate() const {
  check_alpha_beta(alpha, beta);
  if (!(scale >= 0.0)) throw std::invalid_argument("scale must be >= 0");
}

StableSampler::StableSampler(double alpha, double beta)
    : alpha_(alpha), beta_(beta) {
  check_alpha_beta(alpha, beta);
  // Yields the parameterization with characteristic exponent
  // |t|^alpha (1 - i*beta*sign(t)*tan(pi*alpha/2)), in which the projected
  // counter sum_i r_ij A[i] carries scale sum_i A[i]^alpha.
  const double ta = std::tan(kPi * alpha / 2.0);
  b0_ = std::atan(beta * ta) / alpha;
  s0_ = std::pow(1.0 + beta * beta * ta * ta, 0.5 / alpha);
  inv_alpha_ = 1.0 / alpha;
  exp_ratio_ = (1.0 - alpha) / alpha;
}

double StableSampler::operator()(double u, double e) const {
  const double theta = kPi * (u - 0.5);  // uniform on (-pi/2, pi/2)
  const double a_th = alpha_ * (theta + b0_);
  return s0_ * std::sin(a_th) / std::pow(std::cos(theta), inv_alpha_) *
         std::pow(std::cos(theta - a_th) / e, exp_ratio_);
}

double StableSampler::operator()(SeededGenerator& gen) const {
  const double u = gen.next_uniform();
  const double e = -std::log(gen.next_uniform());
  return (*this)(u, e);
}

double sample_standard(double alpha, double beta, double u, double e) {
  if (!(u > 0.0) || !(u < 1.0)) throw std::invalid_argument("u must lie in (0,1)");
  if (!(e > 0.0)) throw std::invalid_argument("e must be > 0");
  return StableSampler(alpha, beta)(u, e);
}

double sample_standard(SeededGenerator& gen, double alpha, double beta) {
  return StableSampler(alpha, beta)(gen);
}

double scale_to(double sample_std, double scale, double alpha) {
  if (!(scale >= 0.0)) throw std::invalid_argument("scale must be >= 0");
  if (!(alpha > 0.0) || !(alpha <= 2.0))
    throw std::invalid_argument("alpha must lie in (0,2]");
  return std::pow(scale, 1.0 / alpha) * sample_std;
}

double projection_entry(const StableSampler& sampler, std::uint64_t seed,
                        std::uint64_t i, std::uint64_t j) {
  // Two counter-hashed words per entry; salts separate the u and e lanes.
  const std::uint64_t h = counter_hash(seed, i, j);
  const double u = unit_open(mix64(h ^ 0xa0761d6478bd642fULL));
  const double e = -std::log(unit_open(mix64(h ^ 0xe7037ed1a0b428dbULL)));
  return sampler(u, e);
}

double projection_entry(std::uint64_t seed, std::uint64_t i, std::uint64_t j,
                        double alpha) {
  return projection_entry(StableSampler(alpha, 1.0), seed, i, j);
}

}  // namespace cc
