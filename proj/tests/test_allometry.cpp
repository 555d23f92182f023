#include <doctest.h>

#include <cmath>
#include <random>

#include "flowallo/allometry.hpp"
#include "flowallo/error.hpp"
#include "flowallo/flowcalc.hpp"
#include "flowallo/synth.hpp"
#include "support.hpp"

using namespace flowallo;
using flowallo::testing::loglog_oracle;

TEST_CASE("exact power law") {
  const std::vector<double> t{1, 10, 100};
  const std::vector<double> c{1, std::pow(10.0, 1.5), 1000};
  const auto f = fit(t, c);
  CHECK(f.eta == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(f.r2 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(f.stderr_eta <= 1e-14);
  CHECK(f.n == 3);
}

TEST_CASE("worked example slope matches the OLS oracle") {
  // Frozen from the normal-equation oracle on (log10 T, log10 C) for
  // T = (3, 2, 2), C = (7, 3, 2); numpy.polyfit agrees to 1e-15.
  const std::vector<double> t{3, 2, 2};
  const std::vector<double> c{7, 3, 2};
  const auto oracle = loglog_oracle(t, c);
  CHECK(oracle.slope == doctest::Approx(2.58969365).epsilon(1e-8));
  const auto f = fit(t, c);
  CHECK(f.eta == doctest::Approx(2.5896936467371026).epsilon(1e-13));
  CHECK(f.eta == doctest::Approx(oracle.slope).epsilon(1e-12));
  CHECK(f.intercept == doctest::Approx(oracle.intercept).epsilon(1e-12));
  CHECK(f.stderr_eta == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-12));
  CHECK(f.r2 == doctest::Approx(oracle.r2).epsilon(1e-12));
  CHECK(f.classification == Hierarchy::Neutral);
}

TEST_CASE("uniform chain network is a degenerate fit") {
  SynthSpec spec;
  spec.kind = SynthKind::Chain;
  spec.n = 6;
  spec.weight = 2.0;
  const auto a = analyze(generate_network(spec));
  CHECK((a.throughflow.array() == 2.0).all());
  CHECK_THROWS_AS(fit(a.throughflow, a.impacts), DegenerateFit);
}

TEST_CASE("fit preconditions") {
  const std::vector<double> t{1, 2};
  CHECK_THROWS_AS(fit(t, t), TooFewPoints);
  const std::vector<double> t3{1, 2, 0};
  const std::vector<double> c3{1, 2, 3};
  CHECK_THROWS_AS(fit(t3, c3), TooFewPoints);  // non-positive pairs are dropped
  const std::vector<double> c2{1, 2};
  CHECK_THROWS_AS(fit(t3, c2), InvalidValue);
}

TEST_CASE("classification thresholds") {
  CHECK(classify(1.136, 0.026) == Hierarchy::Hierarchical);
  CHECK(classify(1.001, 0.020) == Hierarchy::Neutral);
  CHECK(classify(0.90, 0.01) == Hierarchy::Flat);
  CHECK(classify(1.04, 0.02) == Hierarchy::Neutral);  // exactly on the band edge
  CHECK(to_string(Hierarchy::Flat) == "flat");
}

TEST_CASE("property: exact power-law recovery and scale invariance") {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> logt(-3.0, 6.0);
  std::uniform_real_distribution<double> eta(0.5, 2.5);
  std::uniform_real_distribution<double> amp(0.01, 100.0);
  std::normal_distribution<double> noise(0.0, 0.1);
  for (int trial = 0; trial < 50; ++trial) {
    const double e = eta(gen);
    const double a = amp(gen);
    std::vector<double> t, c, cn;
    for (int i = 0; i < 20; ++i) {
      const double ti = std::pow(10.0, logt(gen));
      t.push_back(ti);
      c.push_back(a * std::pow(ti, e));
      cn.push_back(a * std::pow(ti, e) * std::pow(10.0, noise(gen)));
    }
    const auto f = fit(t, c);
    CHECK(f.eta == doctest::Approx(e).epsilon(1e-12));
    CHECK(f.r2 == doctest::Approx(1.0).epsilon(1e-12));

    const auto noisy = fit(t, cn);
    const auto oracle = loglog_oracle(t, cn);
    CHECK(noisy.eta == doctest::Approx(oracle.slope).epsilon(1e-10));
    CHECK(noisy.stderr_eta == doctest::Approx(oracle.stderr_slope).epsilon(1e-8));
    CHECK(noisy.r2 == doctest::Approx(oracle.r2).epsilon(1e-10));
    CHECK(noisy.r2 >= 0.0);
    CHECK(noisy.r2 <= 1.0);

    std::vector<double> ts, cs;
    for (std::size_t i = 0; i < t.size(); ++i) {
      ts.push_back(t[i] * 1e6);
      cs.push_back(cn[i] * 3e-4);
    }
    const auto scaled = fit(ts, cs);
    CHECK(scaled.eta == doctest::Approx(noisy.eta).epsilon(1e-10));
    CHECK(scaled.r2 == doctest::Approx(noisy.r2).epsilon(1e-10));
    CHECK(scaled.classification == noisy.classification);
  }
}

TEST_CASE("tree allometry closed forms") {
  SUBCASE("chain") {
    for (std::size_t n : {1u, 2u, 5u, 40u}) {
      RootedTree tree{n, {}};
      for (std::size_t k = 1; k < n; ++k) tree.edges.emplace_back(k - 1, k);
      const auto ta = tree_allometry(tree);
      CHECK(ta.root == 0);
      for (std::size_t k = 0; k < n; ++k) {
        const double m = static_cast<double>(n - k);  // T_k = N - k + 1 with 1-based k
        CHECK(ta.throughflow[k] == m);
        CHECK(ta.impacts[k] == m * (m + 1) / 2);
      }
    }
  }
  SUBCASE("star") {
    const std::size_t n = 9;
    RootedTree tree{n, {}};
    for (std::size_t k = 1; k < n; ++k) tree.edges.emplace_back(0, k);
    const auto ta = tree_allometry(tree);
    CHECK(ta.throughflow[0] == 9.0);
    CHECK(ta.impacts[0] == 17.0);
    for (std::size_t k = 1; k < n; ++k) {
      CHECK(ta.throughflow[k] == 1.0);
      CHECK(ta.impacts[k] == 1.0);
    }
  }
  SUBCASE("single node") {
    const auto ta = tree_allometry(RootedTree{1, {}});
    CHECK(ta.throughflow == std::vector<double>{1.0});
    CHECK(ta.impacts == std::vector<double>{1.0});
  }
  SUBCASE("non-root ordering") {
    // root is node 2: 2 -> 0, 2 -> 1, 1 -> 3
    const auto ta = tree_allometry(RootedTree{4, {{2, 0}, {2, 1}, {1, 3}}});
    CHECK(ta.root == 2);
    CHECK(ta.throughflow == std::vector<double>{1, 2, 4, 1});
    CHECK(ta.impacts == std::vector<double>{1, 3, 8, 1});
  }
}

TEST_CASE("tree allometry rejects non-trees") {
  CHECK_THROWS_AS(tree_allometry(RootedTree{0, {}}), NotATree);
  CHECK_THROWS_AS(tree_allometry(RootedTree{3, {{0, 1}}}), NotATree);               // two roots
  CHECK_THROWS_AS(tree_allometry(RootedTree{3, {{0, 1}, {1, 0}}}), NotATree);       // cycle + root 2
  CHECK_THROWS_AS(tree_allometry(RootedTree{3, {{0, 1}, {1, 2}, {2, 0}}}), NotATree);
  CHECK_THROWS_AS(tree_allometry(RootedTree{3, {{0, 2}, {1, 2}}}), NotATree);       // two parents
  CHECK_THROWS_AS(tree_allometry(RootedTree{4, {{0, 1}, {2, 3}, {3, 2}}}), NotATree);
  CHECK_THROWS_AS(tree_allometry(RootedTree{2, {{0, 5}}}), NotATree);
  CHECK_THROWS_AS(tree_allometry(RootedTree{2, {{1, 1}}}), NotATree);
}

TEST_CASE("star slope equals log(2N-1)/log(N)") {
  for (std::size_t n : {3u, 10u, 57u, 100u, 1000u}) {
    SynthSpec spec;
    spec.kind = SynthKind::Star;
    spec.n = n;
    const auto ta = tree_allometry(generate_tree(spec));
    const double expected = std::log(2.0 * n - 1.0) / std::log(static_cast<double>(n));
    CHECK(std::fabs(fit(ta.throughflow, ta.impacts).eta - expected) <= 1e-9);
  }
}

TEST_CASE("chain slope sweep approaches 2") {
  // Frozen from the normal-equation oracle over (m, m(m+1)/2), m = 1..N.
  const std::pair<std::size_t, double> frozen[] = {
      {10, 1.753908139550902}, {100, 1.9223499496661387}, {1000, 1.981994741651934}};
  double previous = 0.0;
  for (const auto& [n, slope] : frozen) {
    SynthSpec spec;
    spec.kind = SynthKind::Chain;
    spec.n = n;
    const auto ta = tree_allometry(generate_tree(spec));
    const double eta = fit(ta.throughflow, ta.impacts).eta;
    CHECK(eta == doctest::Approx(slope).epsilon(1e-10));
    CHECK(eta == doctest::Approx(loglog_oracle(ta.throughflow, ta.impacts).slope).epsilon(1e-10));
    CHECK(eta > previous);
    previous = eta;
  }
}

TEST_CASE("property: random trees have slopes within [1, 2]") {
  std::mt19937_64 gen(31);
  std::uniform_int_distribution<std::size_t> size(3, 200);
  for (int trial = 0; trial < 200; ++trial) {
    SynthSpec spec;
    spec.kind = SynthKind::RandomTree;
    spec.n = size(gen);
    spec.seed = gen();
    const auto ta = tree_allometry(generate_tree(spec));
    const double eta = fit(ta.throughflow, ta.impacts).eta;
    CHECK(eta >= 1.0 - 1e-12);
    CHECK(eta <= 2.0 + 1e-9);
  }
}
