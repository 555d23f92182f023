#include <doctest.h>

#include <random>

#include "flowallo/error.hpp"
#include "flowallo/metrics.hpp"
#include "support.hpp"

using namespace flowallo;
using flowallo::testing::gini_pairwise;
using flowallo::testing::pearson_oracle;
using flowallo::testing::record;

namespace {

ComplexityTable table_2x2(double a, double b, double c, double d, double y1 = 9000, double y2 = 36000) {
  Matrix e(2, 2);
  e << a, b, c, d;
  Vector y(2);
  y << y1, y2;
  return ComplexityTable({CountryId::parse("C1"), CountryId::parse("C2")},
                         {ProductCode::parse("1"), ProductCode::parse("2")}, e, y);
}

}  // namespace

TEST_CASE("gini worked values") {
  CHECK(gini(std::vector<double>{4, 4, 4, 4}) == 0.0);
  // Pairwise oracle: sum |xi - xj| = 40, 2 n^2 mean = 150.
  CHECK(gini_pairwise(std::vector<double>{1, 2, 3, 4, 5}) == doctest::Approx(40.0 / 150.0));
  CHECK(gini(std::vector<double>{1, 2, 3, 4, 5}) == doctest::Approx(0.26667).epsilon(1e-5));
  CHECK(gini(std::vector<double>{1, 2, 3, 4, 5}) == doctest::Approx(4.0 / 15.0).epsilon(1e-15));
  CHECK(gini(std::vector<double>{0, 0, 0, 0, 10}) == doctest::Approx(0.8).epsilon(1e-15));
}

TEST_CASE("gini errors") {
  CHECK_THROWS_AS(gini(std::vector<double>{0, 0, 0}), AllZero);
  CHECK_THROWS_AS(gini(std::vector<double>{1}), TooFewPoints);
  CHECK_THROWS_AS(gini(std::vector<double>{1, -1}), InvalidValue);
}

TEST_CASE("property: sorted gini equals the pairwise oracle") {
  std::mt19937_64 gen(41);
  std::uniform_int_distribution<std::size_t> size(2, 1000);
  std::lognormal_distribution<double> value(0.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x(size(gen));
    for (auto& v : x) v = value(gen);
    if (trial % 5 == 0) x[0] = 0.0;
    const double g = gini(x);
    CHECK(std::fabs(g - gini_pairwise(x)) <= 1e-12);
    const double n = static_cast<double>(x.size());
    CHECK(g <= 1.0 - 1.0 / n + 1e-12);
    CHECK(g >= 0.0);
    std::vector<double> scaled(x);
    for (auto& v : scaled) v *= 1234.5;
    CHECK(std::fabs(gini(scaled) - g) <= 1e-12);
  }
}

TEST_CASE("dominance share worked example") {
  CHECK(dominance_share(std::vector<double>{1, 2, 3, 4, 5}) == doctest::Approx(0.3333).epsilon(1e-3));
  CHECK(dominance_share(std::vector<double>{1, 1.4, 1.7, 2, 2.2}) == doctest::Approx(0.2651).epsilon(1e-3));
  CHECK(dominance_share(std::vector<double>{1, 4, 9, 16, 25}) == doctest::Approx(0.4545).epsilon(1e-3));
  CHECK_THROWS_AS(dominance_share(std::vector<double>{0, 0}), AllZero);
}

TEST_CASE("inequality report ranks impacts") {
  const std::vector<CountryId> nodes{CountryId::parse("A"), CountryId::parse("B"), CountryId::parse("C")};
  const std::vector<double> c{2, 7, 7};
  const auto r = inequality_report(nodes, c, 2);
  REQUIRE(r.topk.size() == 2);
  CHECK(r.topk[0].country.str() == "B");  // tie broken by code
  CHECK(r.topk[1].country.str() == "C");
  CHECK(r.dominance == doctest::Approx(r.topk[0].impact / 16.0));
}

TEST_CASE("rca") {
  const auto diag = table_2x2(10, 0, 0, 10);
  CHECK(rca(diag, CountryId::parse("C1"), ProductCode::parse("1")) == 1.0);

  const auto t = table_2x2(5, 5, 0, 10);
  CHECK(rca(t, CountryId::parse("C1"), ProductCode::parse("2")) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(rca(t, CountryId::parse("C2"), ProductCode::parse("2")) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

  const auto scaled = table_2x2(5e6, 5e6, 0, 1e7);
  CHECK(rca(scaled, CountryId::parse("C1"), ProductCode::parse("2")) ==
        doctest::Approx(rca(t, CountryId::parse("C1"), ProductCode::parse("2"))).epsilon(1e-15));

  const auto silent = table_2x2(0, 0, 0, 10);
  CHECK_THROWS_AS(rca(silent, CountryId::parse("C1"), ProductCode::parse("2")), NoExports);
  CHECK_THROWS_AS(rca(silent, CountryId::parse("C2"), ProductCode::parse("1")), NoMarket);
  CHECK_THROWS_AS(rca(t, CountryId::parse("XX"), ProductCode::parse("1")), InvalidValue);
}

TEST_CASE("prody") {
  const auto diag = table_2x2(10, 0, 0, 10, 30000, 5000);
  CHECK(prody(diag, ProductCode::parse("1")) == 30000.0);

  const auto t = table_2x2(5, 5, 0, 10, 9000, 36000);
  CHECK(prody(t, ProductCode::parse("2")) == doctest::Approx(27000.0).epsilon(1e-15));

  const auto flat = table_2x2(3, 1, 2, 7, 20000, 20000);
  CHECK(prody(flat, ProductCode::parse("1")) == doctest::Approx(20000.0).epsilon(1e-15));
  CHECK(prody(flat, ProductCode::parse("2")) == doctest::Approx(20000.0).epsilon(1e-15));
}

TEST_CASE("property: RCA sums to one and PRODY stays within the GDP range") {
  std::mt19937_64 gen(43);
  std::uniform_real_distribution<double> e(0.0, 1e6);
  std::uniform_real_distribution<double> y(500.0, 80000.0);
  std::bernoulli_distribution zero(0.3);
  for (int trial = 0; trial < 50; ++trial) {
    const int nc = 2 + trial % 15;
    const int np = 1 + trial % 7;
    Matrix ex(nc, np);
    Vector gdp(nc);
    std::vector<CountryId> cs;
    std::vector<ProductCode> ps;
    for (int c = 0; c < nc; ++c) {
      cs.push_back(CountryId::parse("C" + std::to_string(c)));
      gdp(c) = y(gen);
      for (int p = 0; p < np; ++p) ex(c, p) = zero(gen) ? 0.0 : e(gen);
    }
    for (int p = 0; p < np; ++p) ps.push_back(ProductCode::parse(std::to_string(p)));
    const ComplexityTable table(cs, ps, ex, gdp);
    for (int p = 0; p < np; ++p) {
      if (!(ex.col(p).sum() > 0.0)) continue;
      double sum = 0.0;
      for (int c = 0; c < nc; ++c) {
        if (ex.row(c).sum() > 0.0) sum += rca(table, cs[c], ps[p]);
      }
      CHECK(std::fabs(sum - 1.0) <= 1e-12);
      const double v = prody(table, ps[p]);
      CHECK(v >= gdp.minCoeff() * (1 - 1e-12));
      CHECK(v <= gdp.maxCoeff() * (1 + 1e-12));
    }
  }
}

TEST_CASE("complexity table from records") {
  const std::vector<TradeRecord> records{
      record(2000, "C1", "C2", "1100", 5), record(2000, "C1", "C2", "2100", 5),
      record(2000, "C2", "C1", "2200", 10), record(2000, "C2", "C2", "1100", 99),
      record(1999, "C2", "C1", "1100", 1), record(2000, "C3", "C1", "1100", 1)};
  const std::map<CountryId, double> gdp{{CountryId::parse("C1"), 9000}, {CountryId::parse("C2"), 36000}};
  std::size_t dropped = 0;
  const auto t = ComplexityTable::from_records(records, 2000, 1, gdp, &dropped);
  CHECK(dropped == 1);
  REQUIRE(t.countries().size() == 2);
  REQUIRE(t.products().size() == 2);
  CHECK(t.exports()(0, 0) == 5.0);
  CHECK(t.exports()(1, 0) == 0.0);  // self-trade excluded
  CHECK(t.exports()(1, 1) == 10.0);
  CHECK(prody(t, ProductCode::parse("2")) == doctest::Approx(27000.0));
}

TEST_CASE("pearson") {
  const std::vector<double> x{1, 2, 3, 4, 5};
  std::vector<double> y;
  for (double v : x) y.push_back(2 * v + 1);
  CHECK(pearson(x, y) == doctest::Approx(1.0).epsilon(1e-15));
  std::vector<double> neg;
  for (double v : x) neg.push_back(-v);
  CHECK(pearson(x, neg) == doctest::Approx(-1.0).epsilon(1e-15));

  const std::vector<double> a{1, 2, 3};
  const std::vector<double> b{1, 3, 2};
  CHECK(pearson_oracle(a, b) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(pearson(a, b) == doctest::Approx(0.5).epsilon(1e-15));

  CHECK_THROWS_AS(pearson(a, std::vector<double>{2, 2, 2}), ZeroVariance);
  CHECK_THROWS_AS(pearson(std::vector<double>{1, 2}, std::vector<double>{1, 2}), TooFewPoints);
}

TEST_CASE("property: pearson is invariant under positive affine maps") {
  std::mt19937_64 gen(47);
  std::normal_distribution<double> v(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(20), y(20);
    for (int i = 0; i < 20; ++i) {
      x[i] = v(gen);
      y[i] = 0.5 * x[i] + v(gen);
    }
    const double r = pearson(x, y);
    CHECK(r == doctest::Approx(pearson_oracle(x, y)).epsilon(1e-12));
    std::vector<double> xa(x), ya(y);
    for (auto& e : xa) e = 3.0 * e + 7.0;
    for (auto& e : ya) e = 0.01 * e - 2.0;
    CHECK(pearson(xa, ya) == doctest::Approx(r).epsilon(1e-12));
  }
}
