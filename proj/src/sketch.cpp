#include "cc/sketch.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "cc/stable.hpp"

namespace cc {

namespace {

// Exact-sum step: adds v into the (hi, lo) pair. TwoSum keeps the full
// rounding error of hi + v; only the lo lane rounds.
inline void dd_add(double& hi, double& lo, double v) {
  const double s = hi + v;
  const double bb = s - hi;
  const double err = (hi - (s - bb)) + (v - bb);
  lo += err;
  const double t = s + lo;
  lo -= t - s;
  hi = t;
}

// Exact product via FMA: r*inc = p + err with no rounding loss, so the
// accumulated counter value is independent of how increments are grouped.
inline void dd_add_product(double& hi, double& lo, double r, double inc) {
  const double p = r * inc;
  const double err = std::fma(r, inc, -p);
  dd_add(hi, lo, p);
  if (err != 0.0) dd_add(hi, lo, err);
}

}  // namespace

CCSketch::CCSketch(double alpha, int k, std::int64_t domain_size,
                   std::uint64_t seed)
    : alpha_(alpha), k_(k), domain_size_(domain_size), seed_(seed),
      sampler_(alpha, 1.0) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (domain_size < 1) throw std::invalid_argument("domain_size must be >= 1");
  hi_ = Eigen::VectorXd::Zero(k);
  lo_ = Eigen::VectorXd::Zero(k);
}

void CCSketch::update(const TurnstileEvent& ev) {
  if (ev.index < 1 || ev.index > domain_size_)
    throw std::out_of_range("event index outside [1, D]");
  if (ev.increment == 0.0) return;
  for (int j = 0; j < k_; ++j) {
    const double r = projection_entry(sampler_, seed_,
                                      static_cast<std::uint64_t>(ev.index),
                                      static_cast<std::uint64_t>(j));
    dd_add_product(hi_[j], lo_[j], r, ev.increment);
  }
}

void CCSketch::merge(const CCSketch& other) {
  if (alpha_ != other.alpha_ || k_ != other.k_ ||
      domain_size_ != other.domain_size_ || seed_ != other.seed_)
    throw std::invalid_argument("merge requires identical sketch parameters");
  for (int j = 0; j < k_; ++j) {
    dd_add(hi_[j], lo_[j], other.hi_[j]);
    dd_add(hi_[j], lo_[j], other.lo_[j]);
  }
}

Eigen::VectorXd CCSketch::counters() const {
  return hi_ + lo_;
}

void ExactSignal::apply(const TurnstileEvent& ev) {
  if (ev.index < 1 || ev.index > values_.size())
    throw std::out_of_range("event index outside [1, D]");
  values_[ev.index - 1] += ev.increment;
}

double exact_moment(const ExactSignal& sig, double alpha) {
  StableParams{alpha, 1.0, 0.0}.validate();
  double f = 0.0;
  for (Eigen::Index i = 0; i < sig.values().size(); ++i) {
    const double v = sig.values()[i];
    if (v == 0.0) continue;
    if (v < 0.0)
      throw TurnstileViolation("strict turnstile violated: A[" +
                               std::to_string(i + 1) + "] = " + std::to_string(v));
    f += std::pow(v, alpha);
  }
  return f;
}

CCSketch project_signal(const ExactSignal& sig, double alpha, int k,
                        std::uint64_t seed) {
  CCSketch sk(alpha, k, sig.domain_size(), seed);
  for (Eigen::Index i = 0; i < sig.values().size(); ++i) {
    if (sig.values()[i] != 0.0)
      sk.update({static_cast<std::int64_t>(i + 1), sig.values()[i]});
  }
  return sk;
}

StreamData read_stream(std::istream& in) {
  StreamData data{0, {}};
  std::string line;
  long line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    if (!have_header) {
      if (line.compare(first, 2, "D=") != 0)
        throw StreamParseError("line " + std::to_string(line_no) +
                               ": expected header D=<domain_size>");
      try {
        data.domain_size = std::stoll(line.substr(first + 2));
      } catch (const std::exception&) {
        throw StreamParseError("line " + std::to_string(line_no) +
                               ": bad domain size");
      }
      if (data.domain_size < 1)
        throw StreamParseError("line " + std::to_string(line_no) +
                               ": domain size must be >= 1");
      have_header = true;
      continue;
    }
    std::istringstream ls(line.substr(first));
    std::int64_t idx;
    double inc;
    if (!(ls >> idx >> inc))
      throw StreamParseError("line " + std::to_string(line_no) +
                             ": expected `<index> <increment>`");
    std::string rest;
    if (ls >> rest && rest[0] != '#')
      throw StreamParseError("line " + std::to_string(line_no) +
                             ": trailing data after increment");
    if (idx < 1 || idx > data.domain_size)
      throw StreamParseError("line " + std::to_string(line_no) +
                             ": index outside [1, D]");
    data.events.push_back({idx, inc});
  }
  if (!have_header) throw StreamParseError("missing D=<domain_size> header");
  return data;
}

StreamData read_stream_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StreamParseError("cannot open stream file: " + path);
  return read_stream(in);
}

void write_stream(std::ostream& out, const StreamData& data) {
  out << "D=" << data.domain_size << "\n";
  out.precision(17);
  for (const auto& ev : data.events)
    out << ev.index << " " << ev.increment << "\n";
}

void write_stream_file(const std::string& path, const StreamData& data) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write stream file: " + path);
  write_stream(out, data);
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace cc
