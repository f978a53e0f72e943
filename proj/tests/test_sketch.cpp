#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "cc/rng.hpp"
#include "cc/sketch.hpp"
#include "cc/stable.hpp"

using namespace cc;

namespace {

bool bit_equal(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) return false;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return false;
  return true;
}

std::uint64_t bounded(SeededGenerator& gen, std::uint64_t n) {
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(gen.next_bits()) * n) >> 64);
}

// Random integer-increment event stream; cancelling pairs keep the net
// signal representable exactly, so the bit-exactness properties are sharp.
std::vector<TurnstileEvent> random_events(SeededGenerator& gen, std::int64_t d,
                                          int count) {
  std::vector<TurnstileEvent> evs;
  for (int m = 0; m < count; ++m) {
    const auto idx = static_cast<std::int64_t>(bounded(gen, static_cast<std::uint64_t>(d))) + 1;
    const auto inc = static_cast<double>(static_cast<std::int64_t>(bounded(gen, 17))) - 8.0;
    evs.push_back({idx, inc});
  }
  return evs;
}

}  // namespace

TEST_CASE("construction") {
  CCSketch sk(0.5, 100, 1'000'000, 42);
  CHECK(sk.counters().size() == 100);
  CHECK(sk.counters().isZero(0.0));
  CHECK_THROWS_AS(CCSketch(1.0, 10, 10, 0), std::invalid_argument);
  CHECK_THROWS_AS(CCSketch(0.5, 0, 10, 0), std::invalid_argument);
  CHECK_NOTHROW(CCSketch(1.5, 1, 10, 7));
}

TEST_CASE("update basics") {
  CCSketch sk(0.75, 10, 100, 3);
  sk.update({5, 2.5});
  const auto before = sk.counters();

  sk.update({7, 0.0});  // zero increment is a no-op
  CHECK(bit_equal(sk.counters(), before));

  sk.update({9, 3.0});
  sk.update({9, -3.0});  // exact cancellation
  CHECK(bit_equal(sk.counters(), before));

  CHECK_THROWS_AS(sk.update({0, 1.0}), std::out_of_range);
  CHECK_THROWS_AS(sk.update({101, 1.0}), std::out_of_range);
}

TEST_CASE("incremental equals batch projection, bit-exactly") {
  SeededGenerator gen(77);
  for (int trial = 0; trial < 200; ++trial) {
    const std::int64_t d = 1 + static_cast<std::int64_t>(bounded(gen, 30));
    const auto evs = random_events(gen, d, 1 + static_cast<int>(bounded(gen, 40)));

    CCSketch inc(1.5, 8, d, 1000 + trial);
    ExactSignal sig(d);
    for (const auto& ev : evs) {
      inc.update(ev);
      sig.apply(ev);
    }
    const auto batch = project_signal(sig, 1.5, 8, 1000 + trial);
    CHECK(bit_equal(inc.counters(), batch.counters()));
  }
}

TEST_CASE("merge") {
  SeededGenerator gen(88);
  const std::int64_t d = 25;
  for (int trial = 0; trial < 100; ++trial) {
    const auto ev1 = random_events(gen, d, 20);
    const auto ev2 = random_events(gen, d, 20);

    CCSketch a(0.5, 6, d, 4), b(0.5, 6, d, 4), cat(0.5, 6, d, 4);
    for (const auto& ev : ev1) { a.update(ev); cat.update(ev); }
    for (const auto& ev : ev2) { b.update(ev); cat.update(ev); }
    a.merge(b);
    CHECK(bit_equal(a.counters(), cat.counters()));
  }

  CCSketch a(0.5, 6, d, 4), zero(0.5, 6, d, 4);
  a.update({3, 2.0});
  const auto before = a.counters();
  a.merge(zero);
  CHECK(bit_equal(a.counters(), before));

  CCSketch other_seed(0.5, 6, d, 5);
  CHECK_THROWS_AS(a.merge(other_seed), std::invalid_argument);
  CCSketch other_k(0.5, 7, d, 4);
  CHECK_THROWS_AS(a.merge(other_k), std::invalid_argument);
}

TEST_CASE("exact moment oracle") {
  ExactSignal sig(2);
  sig.apply({1, 3.0});
  sig.apply({2, 4.0});
  sig.apply({1, -1.0});
  CHECK(exact_moment(sig, 2.0) == doctest::Approx(20.0));

  ExactSignal zero(10);
  CHECK(exact_moment(zero, 0.5) == 0.0);

  ExactSignal ones(Eigen::VectorXd::Ones(37));
  CHECK(exact_moment(ones, 0.5) == doctest::Approx(37.0));
  CHECK(exact_moment(ones, 1.5) == doctest::Approx(37.0));

  ExactSignal neg(3);
  neg.apply({2, -1.0});
  CHECK_THROWS_AS(exact_moment(neg, 0.5), TurnstileViolation);
}

TEST_CASE("counter distribution is the scaled stable law") {
  // Fixed signal, varying seeds: each counter ~ S(alpha, 1, F_alpha).
  const double alpha = 0.5;
  Eigen::VectorXd a(5);
  a << 1.0, 2.0, 0.5, 3.0, 1.5;
  const ExactSignal sig(a);
  double f = 0.0;
  for (int i = 0; i < 5; ++i) f += std::pow(a[i], alpha);

  const int n_seeds = 100'000;
  std::vector<double> counters(n_seeds), reference(n_seeds);
  for (int s = 0; s < n_seeds; ++s)
    counters[static_cast<std::size_t>(s)] =
        project_signal(sig, alpha, 1, static_cast<std::uint64_t>(s)).counters()[0];

  const StableSampler sampler(alpha, 1.0);
  SeededGenerator gen(31337);
  for (int s = 0; s < n_seeds; ++s)
    reference[static_cast<std::size_t>(s)] = scale_to(sampler(gen), f, alpha);

  std::sort(counters.begin(), counters.end());
  std::sort(reference.begin(), reference.end());
  for (int d = 1; d <= 9; ++d) {
    const auto idx = static_cast<std::size_t>(d) * n_seeds / 10;
    CAPTURE(d);
    // wide tolerance: both sides are 1e5-sample quantiles of a heavy tail
    CHECK(counters[idx] == doctest::Approx(reference[idx]).epsilon(0.05));
  }
}

TEST_CASE("stream file round trip and parse errors") {
  StreamData data{50, {{1, 2.0}, {50, -0.25}, {7, 1.5}}};
  std::stringstream ss;
  write_stream(ss, data);
  const auto back = read_stream(ss);
  CHECK(back.domain_size == 50);
  REQUIRE(back.events.size() == 3);
  CHECK(back.events[1].index == 50);
  CHECK(back.events[1].increment == -0.25);

  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return read_stream(in);
  };
  CHECK_NOTHROW(parse("# comment\nD=4\n1 1.0\n# more\n4 -2\n"));
  CHECK_THROWS_AS(parse("1 1.0\n"), StreamParseError);          // missing header
  CHECK_THROWS_AS(parse("D=4\n5 1.0\n"), StreamParseError);     // index > D
  CHECK_THROWS_AS(parse("D=4\n1\n"), StreamParseError);         // missing increment
  CHECK_THROWS_AS(parse("D=0\n"), StreamParseError);
  CHECK_THROWS_WITH_AS(parse("D=4\n1 1.0\nbroken\n"),
                       doctest::Contains("line 3"), StreamParseError);
}
