#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "bitrel/error.hpp"
#include "bitrel/eval.hpp"
#include "oracle.hpp"

using namespace bitrel;

namespace {

// Direct summation of the soft confusion formulas over ordered pairs.
ConfusionCounts naive_confusion(const KnownAdjacency& k, const ScoreMatrix& e) {
  ConfusionCounts c;
  for (std::size_t i = 0; i < k.size(); ++i) {
    for (std::size_t j = 0; j < k.size(); ++j) {
      if (i == j) continue;
      const double kij = k.connected(i, j) ? 1.0 : 0.0;
      const double eij = e.at(i, j).value_or(0.0);
      c.tp += std::min(kij, eij);
      c.fp += std::min(1 - kij, eij);
      c.fn += std::min(kij, 1 - eij);
      c.tn += std::min(1 - kij, 1 - eij);
    }
  }
  return c;
}

KnownAdjacency random_adjacency(oracle::Gen& gen, std::size_t m) {
  KnownAdjacency k(m);
  std::bernoulli_distribution edge(0.2);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      if (edge(gen.rng)) k.connect(i, j);
  return k;
}

ScoreMatrix random_scores(oracle::Gen& gen, std::size_t m) {
  ScoreMatrix e(MetricKind::Cov, m);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) e.set(i, j, u(gen.rng));
  return e;
}

ScoreMatrix from_adjacency(const KnownAdjacency& k, bool invert) {
  ScoreMatrix e(MetricKind::Ham, k.size());
  for (std::size_t i = 0; i < k.size(); ++i)
    for (std::size_t j = i + 1; j < k.size(); ++j) e.set(i, j, k.connected(i, j) != invert ? 1.0 : 0.0);
  return e;
}

}  // namespace

TEST_CASE("worked single-cell examples") {
  ConfusionCounts pos;
  pos.add_cell(true, 0.7);
  CHECK(pos.tp == 0.7);
  CHECK(pos.fn == 1.0 - 0.7);
  CHECK(pos.fp == 0.0);
  CHECK(pos.tn == 0.0);

  ConfusionCounts neg;
  neg.add_cell(false, 0.7);
  CHECK(neg.tn == 1.0 - 0.7);
  CHECK(neg.fp == 0.7);
  CHECK(neg.tp == 0.0);
  CHECK(neg.fn == 0.0);
}

TEST_CASE("confusion counts each unordered pair twice") {
  KnownAdjacency k(2);
  k.connect(0, 1);
  ScoreMatrix e(MetricKind::Cov, 2);
  e.set(0, 1, 0.7);
  const auto c = confusion(k, e);
  CHECK(c.tp == doctest::Approx(1.4));
  CHECK(c.fn == doctest::Approx(0.6));
  CHECK(c.fp == 0.0);
  CHECK(c.tn == 0.0);
}

TEST_CASE("confusion matches direct summation") {
  oracle::Gen gen(31);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = gen.length(2, 30);
    const auto k = random_adjacency(gen, m);
    const auto e = random_scores(gen, m);
    const auto got = confusion(k, e);
    const auto want = naive_confusion(k, e);
    CHECK(got.tp == doctest::Approx(want.tp).epsilon(1e-12));
    CHECK(got.fp == doctest::Approx(want.fp).epsilon(1e-12));
    CHECK(got.fn == doctest::Approx(want.fn).epsilon(1e-12));
    CHECK(got.tn == doctest::Approx(want.tn).epsilon(1e-12));
  }
}

TEST_CASE("per-cell conservation") {
  oracle::Gen gen(32);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 10000; ++trial) {
    const double e = u(gen.rng);
    for (bool known : {false, true}) {
      ConfusionCounts c;
      c.add_cell(known, e);
      if (known) {
        CHECK(c.tp + c.fn == 1.0);
        CHECK(c.fp + c.tn == 0.0);
      } else {
        CHECK(c.fp + c.tn == 1.0);
        CHECK(c.tp + c.fn == 0.0);
      }
    }
  }
}

TEST_CASE("totals match known positives and negatives") {
  oracle::Gen gen(33);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = gen.length(2, 40);
    const auto k = random_adjacency(gen, m);
    const auto c = confusion(k, random_scores(gen, m));
    const double positives = 2.0 * k.edge_count();
    const double negatives = static_cast<double>(m * (m - 1)) - positives;
    CHECK(c.tp + c.fn == doctest::Approx(positives).epsilon(1e-12));
    CHECK(c.tn + c.fp == doctest::Approx(negatives).epsilon(1e-12));
    const auto s = statistics(c);
    CHECK(*s.acc == doctest::Approx((c.tp + c.tn) / (positives + negatives)).epsilon(1e-12));
  }
}

TEST_CASE("statistics examples") {
  SUBCASE("balanced 0.7") {
    const auto s = statistics({0.7, 0.3, 0.3, 0.7});
    CHECK(*s.tpr == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(*s.tnr == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(*s.ppv == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(*s.npv == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(*s.acc == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(*s.bacc == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(*s.bmi == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(*s.mcc == doctest::Approx(0.4).epsilon(1e-12));
  }
  SUBCASE("uninformed") {
    const auto s = statistics({0.25, 0.25, 0.25, 0.25});
    for (auto v : {s.tpr, s.tnr, s.ppv, s.npv, s.acc, s.bacc}) CHECK(*v == 0.5);
    CHECK(*s.bmi == 0.0);
    CHECK(*s.mcc == 0.0);
  }
  SUBCASE("perfect") {
    const auto s = statistics({1.0, 0.0, 0.0, 1.0});
    for (auto v : {s.tpr, s.tnr, s.ppv, s.npv, s.acc, s.bacc, s.bmi, s.mcc}) CHECK(*v == 1.0);
  }
  SUBCASE("zero denominators are undefined") {
    const auto s = statistics({0.0, 0.0, 0.0, 2.0});
    CHECK_FALSE(s.tpr.has_value());
    CHECK_FALSE(s.ppv.has_value());
    CHECK(*s.tnr == 1.0);
    CHECK(*s.npv == 1.0);
    CHECK_FALSE(s.bacc.has_value());
    CHECK_FALSE(s.bmi.has_value());
    CHECK_FALSE(s.mcc.has_value());
    CHECK_FALSE(statistics({}).acc.has_value());
  }
}

TEST_CASE("StatSet invariants on random counts") {
  oracle::Gen gen(34);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int trial = 0; trial < 5000; ++trial) {
    const ConfusionCounts c{u(gen.rng), u(gen.rng), u(gen.rng), u(gen.rng)};
    const auto s = statistics(c);
    REQUIRE(s.tpr);
    REQUIRE(s.tnr);
    CHECK(*s.bacc == doctest::Approx((*s.tpr + *s.tnr) / 2));
    CHECK(*s.bmi == doctest::Approx(*s.tpr + *s.tnr - 1));
    CHECK(*s.acc >= std::min(*s.tpr, *s.tnr) - 1e-12);
    CHECK(*s.acc <= std::max(*s.tpr, *s.tnr) + 1e-12);
    CHECK(*s.mcc >= -1.0);
    CHECK(*s.mcc <= 1.0);
    CHECK(*s.bmi >= -1.0);
    CHECK(*s.bmi <= 1.0);
  }
}

TEST_CASE("MCC sign for exact and inverted estimators") {
  oracle::Gen gen(35);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = gen.length(3, 25);
    auto k = random_adjacency(gen, m);
    if (k.edge_count() == 0) k.connect(0, 1);
    if (k.edge_count() == m * (m - 1) / 2) continue;
    const auto exact_counts = confusion(k, from_adjacency(k, false));
    CHECK(exact_counts.fp == 0.0);
    CHECK(exact_counts.fn == 0.0);
    const auto exact = statistics(exact_counts);
    CHECK(*exact.acc == 1.0);
    CHECK(*exact.mcc == 1.0);
    CHECK(*statistics(confusion(k, from_adjacency(k, true))).mcc == -1.0);
  }
}

TEST_CASE("statistics are invariant to simultaneous permutation") {
  oracle::Gen gen(36);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t m = gen.length(3, 20);
    const auto k = random_adjacency(gen, m);
    const auto e = random_scores(gen, m);
    std::vector<std::size_t> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), gen.rng);
    KnownAdjacency kp(m);
    ScoreMatrix ep(e.kind(), m);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        if (k.connected(i, j)) kp.connect(perm[i], perm[j]);
        ep.set(perm[i], perm[j], e.at(i, j));
      }
    }
    const auto a = statistics(confusion(k, e));
    const auto b = statistics(confusion(kp, ep));
    for (Statistic s : kAllStatistics) {
      REQUIRE(a.get(s).has_value() == b.get(s).has_value());
      if (a.get(s)) CHECK(*a.get(s) == doctest::Approx(*b.get(s)).epsilon(1e-12));
    }
  }
}

TEST_CASE("undefined-score policies") {
  KnownAdjacency k(3);
  k.connect(0, 1);
  ScoreMatrix e(MetricKind::Tmt, 3);
  e.set(0, 1, 0.5);
  e.set(0, 2, std::nullopt);
  e.set(1, 2, 0.25);

  const auto zero = confusion(k, e, UndefinedPolicy::Zero);
  CHECK(zero.tp + zero.fp + zero.fn + zero.tn == doctest::Approx(6.0));
  CHECK(zero.tn == doctest::Approx(2 * 1.0 + 2 * 0.75));

  const auto skip = confusion(k, e, UndefinedPolicy::Skip);
  CHECK(skip.tp + skip.fp + skip.fn + skip.tn == doctest::Approx(4.0));
  CHECK(skip.tn == doctest::Approx(2 * 0.75));

  CHECK(parse_policy("ZERO") == UndefinedPolicy::Zero);
  CHECK(parse_policy("skip") == UndefinedPolicy::Skip);
  CHECK_FALSE(parse_policy("drop").has_value());
}

TEST_CASE("dimension mismatch") {
  KnownAdjacency k(3);
  ScoreMatrix e(MetricKind::Ham, 4);
  CHECK_THROWS_AS(confusion(k, e), UsageError);
}

TEST_CASE("all-half estimator gives balanced rates") {
  oracle::Gen gen(37);
  const auto k = random_adjacency(gen, 12);
  ScoreMatrix e(MetricKind::Cov, 12);
  for (std::size_t i = 0; i < 12; ++i)
    for (std::size_t j = i + 1; j < 12; ++j) e.set(i, j, 0.5);
  const auto s = statistics(confusion(k, e));
  CHECK(*s.tpr == 0.5);
  CHECK(*s.tnr == 0.5);
}

TEST_CASE("score_system") {
  SUBCASE("identity edge") {
    SystemSpec spec;
    spec.seed = 8;
    spec.type = SystemType::And;
    spec.m_src = 1;
    spec.m_dst = 1;
    spec.src_density = {0.4};
    spec.dst_functions = {NodeFunction{{0}, {}}};
    const auto traces = sample_traces(spec, 1000);
    const auto rows = score_system(spec, traces, Weighting::uniform(1000));
    REQUIRE(rows.size() == 6);
    CHECK(rows[0].metric == MetricKind::Ham);
    CHECK(*rows[0].stats.tpr == 1.0);
  }
  SUBCASE("independent cells score near zero under Cov") {
    SystemSpec spec;
    spec.seed = 9;
    spec.type = SystemType::Or;
    spec.m_src = 5;
    spec.m_dst = 1;
    spec.src_density = {0.3, 0.5, 0.7, 0.2, 0.6};
    spec.dst_functions = {NodeFunction{{0}, {}}};
    const std::size_t n = 100000;
    const auto traces = sample_traces(spec, n);
    const MetricKind cov_only[] = {MetricKind::Cov};
    const auto rows = score_system(spec, traces, Weighting::uniform(n), UndefinedPolicy::Zero, cov_only);
    REQUIRE(rows.size() == 1);
    const auto& c = rows[0].counts;
    CHECK(c.fp / (c.fp + c.tn) < 0.02);
    // The only edge is an identity copy, scored 4p(1-p) with p = 0.3.
    CHECK(*rows[0].stats.tpr == doctest::Approx(0.84).epsilon(0.02));
  }
  SUBCASE("deterministic") {
    const auto spec = draw_system(17, 2);
    const auto a = score_system(spec, sample_traces(spec, 2000), Weighting::uniform(2000));
    const auto b = score_system(spec, sample_traces(spec, 2000), Weighting::uniform(2000));
    CHECK(a == b);
  }
  SUBCASE("trace count must match") {
    const auto spec = draw_system(17, 2);
    auto traces = sample_traces(spec, 100);
    traces.pop_back();
    CHECK_THROWS_AS(score_system(spec, traces, Weighting::uniform(100)), UsageError);
  }
}

TEST_CASE("statistic names") {
  for (Statistic s : kAllStatistics) CHECK(parse_statistic(to_string(s)) == s);
  CHECK(parse_statistic("MCC") == Statistic::Mcc);
  CHECK_FALSE(parse_statistic("f1").has_value());
}
