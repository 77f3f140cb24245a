#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rfkern/metrics.hpp"
#include "rfkern/rng.hpp"

using namespace rfkern;
using testing::c_index_oracle;
using OracleResult = testing::ConcordanceOracle;

namespace {

SurvivalData random_survival(Rng& rng, int n) {
  SurvivalData d;
  d.time.resize(n);
  d.event.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    d.time[i] = 0.05 + rng.uniform();
    d.event[static_cast<std::size_t>(i)] = rng.uniform() < 0.7 ? 1 : 0;
  }
  // Introduce tied times.
  for (int i = 0; i < n; ++i)
    if (rng.uniform() < 0.3) d.time[i] = d.time[static_cast<int>(rng.uniform_index(n))];
  return d;
}

}  // namespace

TEST_CASE("mse basics") {
  Vector a(3), b(3);
  a << 1.0, 2.0, 3.0;
  b = a;
  CHECK(mse(a, b).value == 0.0);

  Vector t(2), p(2);
  t << 0.0, 0.0;
  p << 1.0, 3.0;
  CHECK(mse(t, p).value == doctest::Approx(5.0));

  CHECK_THROWS_AS(mse(a, p), ShapeMismatchError);
  CHECK_THROWS_AS(mse(Vector(), Vector()), EmptyDataError);
}

TEST_CASE("mse matches a second independently coded loop") {
  Rng rng(11);
  Vector t(100), p(100);
  for (int i = 0; i < 100; ++i) {
    t[i] = rng.normal();
    p[i] = rng.normal();
  }
  double acc = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double r = t[i] - p[i];
    acc += r * r;
  }
  CHECK(mse(t, p).value == doctest::Approx(acc / 100.0).epsilon(1e-14));
}

TEST_CASE("accuracy basics") {
  Vector a(4), b(4);
  a << 1, -1, 1, -1;
  b << 1, -1, 1, -1;
  CHECK(accuracy(a, b).value == 1.0);
  CHECK(accuracy(a, (-b).eval()).value == 0.0);
  b[3] = 1;
  CHECK(accuracy(a, b).value == doctest::Approx(0.75));

  Vector bad(4);
  bad << 1, 0, 1, -1;
  CHECK_THROWS_AS(accuracy(a, bad), InvalidLabelError);
}

TEST_CASE("c_index on the printed two-point direction") {
  // Larger prognostic index paired with the shorter time scores 1.
  SurvivalData d;
  d.time.resize(2);
  d.time << 1.0, 2.0;
  d.event = {1, 1};
  Vector h(2);
  h << 5.0, 1.0;
  const MetricValue m = c_index(d, h);
  CHECK(m.value == 1.0);
  CHECK(m.n_pairs_comparable == 2);

  // Constant index scores 0 under the strict inequality.
  Vector flat = Vector::Constant(2, 3.0);
  CHECK(c_index(d, flat).value == 0.0);
  CHECK(c_index(d, flat, true).value == doctest::Approx(0.5));
}

TEST_CASE("c_index equals the exhaustive oracle on a censored toy set") {
  SurvivalData d;
  d.time.resize(5);
  d.time << 2.0, 1.0, 3.0, 2.0, 5.0;
  d.event = {1, 0, 1, 1, 0};
  Vector h(5);
  h << 0.3, 1.2, -0.4, 0.3, -2.0;
  const MetricValue m = c_index(d, h);
  const OracleResult o = c_index_oracle(d, h);
  CHECK(m.n_pairs_comparable == o.comparable);
  CHECK(m.value == o.concordant / static_cast<double>(o.comparable));
}

TEST_CASE("c_index equals the oracle on random censored instances") {
  Rng rng(202);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3 + static_cast<int>(rng.uniform_index(10));
    SurvivalData d = random_survival(rng, n);
    long events = 0;
    for (int e : d.event) events += e;
    if (events == 0) continue;
    Vector h(n);
    for (int i = 0; i < n; ++i) h[i] = std::round(rng.normal() * 4.0) / 4.0;  // tied scores too
    OracleResult o = c_index_oracle(d, h);
    if (o.comparable == 0) {
      CHECK_THROWS_AS(c_index(d, h), NoComparablePairsError);
      continue;
    }
    const MetricValue m = c_index(d, h);
    CHECK(m.n_pairs_comparable == o.comparable);
    CHECK(m.value == o.concordant / static_cast<double>(o.comparable));
  }
}

TEST_CASE("c_index invariances") {
  Rng rng(7);
  SurvivalData d = random_survival(rng, 30);
  d.event[0] = 1;
  Vector h(30);
  for (int i = 0; i < 30; ++i) h[i] = rng.normal();

  const double base = c_index(d, h).value;
  // Monotone transforms preserve the value.
  Vector g = h;
  for (int i = 0; i < 30; ++i) g[i] = std::exp(0.5 * h[i]) + 2.0;
  CHECK(c_index(d, g).value == base);

  // Without ties, reversing the index complements the score.
  CHECK(c_index(d, h).value + c_index(d, (-h).eval()).value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("c_index error cases") {
  SurvivalData d;
  d.time.resize(2);
  d.time << 1.0, 2.0;
  d.event = {0, 0};
  Vector h(2);
  h << 1.0, 0.0;
  CHECK_THROWS_AS(c_index(d, h), NoComparablePairsError);

  d.event = {1, 1};
  Vector short_h(1);
  short_h << 1.0;
  CHECK_THROWS_AS(c_index(d, short_h), ShapeMismatchError);
}

TEST_CASE("mse and accuracy are invariant under joint permutation") {
  Rng rng(5);
  Vector t(40), p(40);
  for (int i = 0; i < 40; ++i) {
    t[i] = rng.uniform() < 0.5 ? -1.0 : 1.0;
    p[i] = rng.uniform() < 0.5 ? -1.0 : 1.0;
  }
  std::vector<int> perm(40);
  for (int i = 0; i < 40; ++i) perm[static_cast<std::size_t>(i)] = i;
  rng.shuffle(perm);
  Vector tp(40), pp(40);
  for (int i = 0; i < 40; ++i) {
    tp[i] = t[perm[static_cast<std::size_t>(i)]];
    pp[i] = p[perm[static_cast<std::size_t>(i)]];
  }
  CHECK(accuracy(t, p).value == accuracy(tp, pp).value);
  CHECK(mse(t, p).value == doctest::Approx(mse(tp, pp).value).epsilon(1e-15));
}
