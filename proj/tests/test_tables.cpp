#include <doctest.h>

#include <cmath>

#include "cc/estimators.hpp"
#include "cc/tables.hpp"

using namespace cc;

TEST_CASE("table lookup") {
  CHECK(optimal_quantile_table().size() == 30);
  const auto& r = lookup(1.5);
  CHECK(r.q_star == 0.778);
  CHECK(r.var_factor == 1.502868);
  CHECK(r.w_qstar == 2.191925);
  CHECK(lookup(0.5).w_qstar == 0.4522449);
  CHECK(lookup(2.0).q_star == 0.862);
  CHECK_THROWS_AS(lookup(1.0), NoEntry);
  CHECK_THROWS_AS(lookup(0.77), NoEntry);
}

TEST_CASE("empirical distribution construction") {
  CHECK_THROWS_AS(build_empirical(0.5, 10'000, 1), std::invalid_argument);

  const auto d = build_empirical(0.5, 200'000, 1);
  CHECK(d.samples.size() == 200'000);
  // alpha < 1, beta = 1: one-sided support
  CHECK(d.samples[0] > 0.0);
  // sorted
  for (int i = 1; i < 1'000; ++i) CHECK(d.samples[i] >= d.samples[i - 1]);
  CHECK(d.quantile(0.2) <= d.quantile(0.8));

  // different seeds agree at the median to Monte Carlo accuracy
  const auto d2 = build_empirical(0.5, 200'000, 2);
  CHECK(d.quantile(0.5) == doctest::Approx(d2.quantile(0.5)).epsilon(0.02));
}

TEST_CASE("derive_wq matches the published scale factors") {
  const auto d15 = build_empirical(1.5, 2'000'000, 3);
  CHECK(derive_wq(d15, 0.778) == doctest::Approx(2.191925).epsilon(0.01));
  const auto d09 = build_empirical(0.9, 2'000'000, 4);
  CHECK(derive_wq(d09, 0.101) == doctest::Approx(5.400842).epsilon(0.01));
}

TEST_CASE("table scale column is self-consistent (known exceptions noted)") {
  // Two rows disagree with the oracle: alpha = 0.95 by an order of magnitude
  // and alpha = 0.3 by a digit transposition (0.11484 vs 0.14840). Both are
  // preserved verbatim and excluded here.
  for (const auto& row : optimal_quantile_table()) {
    if (row.alpha == 0.95 || row.alpha == 0.3) continue;
    CAPTURE(row.alpha);
    const auto d = build_empirical(row.alpha, 2'000'000, 5);
    CHECK(derive_wq(d, row.q_star) ==
          doctest::Approx(row.w_qstar).epsilon(0.02));
  }
}

TEST_CASE("alpha = 0.95 published scale factor disagrees with the oracle") {
  const auto d = build_empirical(0.95, 2'000'000, 6);
  const double w = derive_wq(d, 0.101);
  const auto& row = lookup(0.95);
  CHECK(std::abs(w - row.w_qstar) / w > 0.5);
  // the estimator still normalizes correctly with the oracle value
  CHECK(w / row.w_qstar == doctest::Approx(10.0).epsilon(0.05));
}

TEST_CASE("alpha = 0.3 published scale factor is a digit transposition") {
  const auto d = build_empirical(0.3, 2'000'000, 16);
  // published 0.11484008; the oracle value 0.14840 has the same digits
  CHECK(derive_wq(d, 0.167) == doctest::Approx(0.148401).epsilon(0.01));
}

TEST_CASE("derived variance factors match the table") {
  const auto d = build_empirical(1.5, 2'000'000, 7);
  const double v = derive_variance_factor(d, 0.778, 1'000, 4'000, 8);
  CHECK(v == doctest::Approx(1.502868).epsilon(0.10));

  // local optimality of q* on a coarse neighborhood
  const double lo = derive_variance_factor(d, 0.778 - 0.05, 1'000, 4'000, 8);
  const double hi = derive_variance_factor(d, 0.778 + 0.05, 1'000, 4'000, 8);
  CHECK(v <= lo * 1.02);
  CHECK(v <= hi * 1.02);

  const auto d05 = build_empirical(0.5, 2'000'000, 9);
  CHECK(derive_variance_factor(d05, 0.137, 1'000, 4'000, 10) ==
        doctest::Approx(0.76653704).epsilon(0.10));
}

TEST_CASE("variance column spot check across the table") {
  for (double a : {0.3, 0.5, 0.9, 1.2, 1.5, 1.8}) {
    CAPTURE(a);
    const auto& row = lookup(a);
    const auto d = build_empirical(a, 1'000'000, 11);
    CHECK(derive_variance_factor(d, row.q_star, 1'000, 3'000, 12) ==
          doctest::Approx(row.var_factor).epsilon(0.10));
  }
}

TEST_CASE("derive_qstar recovers the tabulated optimum") {
  const auto r = derive_qstar(0.5, 0.01, 200, 1'500, 13);
  CHECK(std::abs(r.q_star - 0.137) <= 0.03);
  CHECK(r.var_factor == doctest::Approx(0.76653704).epsilon(0.15));
  CHECK_THROWS_AS(derive_qstar(0.5, 0.2, 200, 1'500, 13), std::invalid_argument);
  CHECK_THROWS_AS(derive_qstar(0.5, 0.01, 10, 1'500, 13), std::invalid_argument);
  CHECK_THROWS_AS(derive_qstar(0.5, 0.01, 200, 10, 13), std::invalid_argument);
}

TEST_CASE("variance profile in q is unimodal up to noise") {
  for (double a : {0.5, 1.5}) {
    CAPTURE(a);
    const auto d = build_empirical(a, 500'000, 14);
    const auto& row = lookup(a);
    double at_star = derive_variance_factor(d, row.q_star, 500, 2'000, 15);
    for (double q = 0.05; q < 0.96; q += 0.05) {
      const double v = derive_variance_factor(d, q, 500, 2'000, 15);
      CHECK(v >= at_star / 1.05);
    }
  }
}
