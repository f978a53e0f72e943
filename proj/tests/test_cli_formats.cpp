#include <doctest.h>

#include <sstream>

#include "cc/estimators.hpp"
#include "cc/sketch.hpp"

using namespace cc;

TEST_CASE("estimator names") {
  CHECK(EstimatorKind::gm().name() == "gm");
  CHECK(EstimatorKind::hm().name() == "hm");
  CHECK(EstimatorKind::mle05().name() == "mle");
  CHECK(EstimatorKind::op().name() == "op");
  CHECK(EstimatorKind::oq().name() == "oq");
  CHECK(EstimatorKind::quantile(0.25, 1.0).name() == "quantile");
}

TEST_CASE("dispatcher routes to the named estimator") {
  Eigen::VectorXd x(8);
  x << 0.3, 1.2, 0.8, 2.5, 0.1, 0.9, 1.7, 0.4;
  CHECK(estimate(EstimatorKind::gm(), x, 0.5).value ==
        estimate_gm(x, 0.5).value);
  CHECK(estimate(EstimatorKind::hm(), x, 0.5).value ==
        estimate_hm(x, 0.5).value);
  CHECK(estimate(EstimatorKind::mle05(), x, 0.5).value ==
        estimate_mle05(x).value);
  CHECK(estimate(EstimatorKind::op(), x, 0.5).value ==
        estimate_op(x, 0.5, optimal_lambda(0.5)).value);
  CHECK(estimate(EstimatorKind::quantile(0.5, 1.0), x, 0.5).value ==
        estimate_quantile(x, 0.5, 0.5, 1.0).value);
  CHECK(estimate(EstimatorKind::oq(), x, 0.5).value ==
        estimate_oq(x, 0.5).value);
}

TEST_CASE("stream text format") {
  StreamData d{4, {{1, 2.5}, {3, -1.0}, {4, 0.25}}};
  std::ostringstream out;
  write_stream(out, d);
  const std::string text = out.str();
  CHECK(text.substr(0, 4) == "D=4\n");

  std::istringstream in(text);
  const StreamData back = read_stream(in);
  CHECK(back.domain_size == 4);
  REQUIRE(back.events.size() == 3);
  CHECK(back.events[1].index == 3);
  CHECK(back.events[1].increment == -1.0);
  CHECK(back.events[2].increment == 0.25);
}

TEST_CASE("stream parser tolerates comments and blank lines") {
  std::istringstream in(
      "# generated stream\n"
      "D=10\n"
      "\n"
      "1 3.5   # trailing comment\n"
      "10 -2\n");
  const StreamData d = read_stream(in);
  CHECK(d.domain_size == 10);
  REQUIRE(d.events.size() == 2);
  CHECK(d.events[0].increment == 3.5);
  CHECK(d.events[1].index == 10);
}

TEST_CASE("stream parser rejects malformed input") {
  auto parse = [](const char* s) {
    std::istringstream in(s);
    return read_stream(in);
  };
  CHECK_THROWS_AS(parse("1 2.0\n"), StreamParseError);           // no header
  CHECK_THROWS_AS(parse("D=0\n"), StreamParseError);             // empty domain
  CHECK_THROWS_AS(parse("D=4\nfoo bar\n"), StreamParseError);    // bad event
  CHECK_THROWS_AS(parse("D=4\n1\n"), StreamParseError);          // missing field
  CHECK_THROWS_AS(parse("D=4\n1 2.0 extra\n"), StreamParseError);
}

TEST_CASE("round-trip preserves increments exactly") {
  StreamData d{100, {}};
  for (int i = 1; i <= 100; ++i)
    d.events.push_back({i, (i % 7 - 3) * 0.015625});  // exact binary values
  std::ostringstream out;
  write_stream(out, d);
  std::istringstream in(out.str());
  const StreamData back = read_stream(in);
  REQUIRE(back.events.size() == d.events.size());
  for (std::size_t i = 0; i < d.events.size(); ++i) {
    CHECK(back.events[i].index == d.events[i].index);
    CHECK(back.events[i].increment == d.events[i].increment);
  }
}
