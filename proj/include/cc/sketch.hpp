#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "cc/stable.hpp"

namespace cc {

// One turnstile arrival: signed increment at a 1-based index.
struct TurnstileEvent {
  std::int64_t index;  // in [1, D]
  double increment;    // positive = insertion, negative = deletion
};

// Raised by exact_moment when the queried signal has a negative entry.
struct TurnstileViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// k projected counters x = R^T A, maintained in O(k) per event. R is
// implicit: entries are regenerated from (seed, i, j) on demand.
//
// Counters accumulate in compensated double-double form so that event
// order, merge grouping, and batch projection of the net signal all
// produce bit-identical rounded counters.
class CCSketch {
 public:
  CCSketch(double alpha, int k, std::int64_t domain_size, std::uint64_t seed);

  void update(const TurnstileEvent& ev);
  void merge(const CCSketch& other);  // counter-wise sum; same params required

  // Rounded counter values.
  Eigen::VectorXd counters() const;

  double alpha() const { return alpha_; }
  int k() const { return k_; }
  std::int64_t domain_size() const { return domain_size_; }
  std::uint64_t seed() const { return seed_; }

 private:
  double alpha_;
  int k_;
  std::int64_t domain_size_;
  std::uint64_t seed_;
  StableSampler sampler_;
  Eigen::VectorXd hi_, lo_;
};

// Dense exact signal A_t, the validation oracle the sketch replaces.
class ExactSignal {
 public:
  explicit ExactSignal(std::int64_t domain_size)
      : values_(Eigen::VectorXd::Zero(domain_size)) {}
  explicit ExactSignal(Eigen::VectorXd values) : values_(std::move(values)) {}

  void apply(const TurnstileEvent& ev);
  const Eigen::VectorXd& values() const { return values_; }
  std::int64_t domain_size() const { return values_.size(); }

 private:
  Eigen::VectorXd values_;
};

// F_(alpha) = sum_i A[i]^alpha over nonzero entries. The relaxed strict
// turnstile contract is enforced here, at query time only: any negative
// entry raises TurnstileViolation.
double exact_moment(const ExactSignal& sig, double alpha);

// Batch projection of a net signal; reference for the incremental path.
CCSketch project_signal(const ExactSignal& sig, double alpha, int k,
                        std::uint64_t seed);

// Stream file: header `D=<domain_size>`, then one `<index> <increment>`
// per line; `#` starts a comment.
struct StreamData {
  std::int64_t domain_size;
  std::vector<TurnstileEvent> events;
};

struct StreamParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

StreamData read_stream(std::istream& in);
StreamData read_stream_file(const std::string& path);
void write_stream(std::ostream& out, const StreamData& data);
void write_stream_file(const std::string& path, const StreamData& data);

}  // namespace cc
