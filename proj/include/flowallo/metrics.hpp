#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "flowallo/netcore.hpp"

namespace flowallo {

/// Population GINI, sum_ij |x_i - x_j| / (2 n^2 mean), via the sorted
/// identity. Needs n >= 2 nonnegative values; throws AllZero when all are zero.
double gini(std::span<const double> values);

/// Share of the total held by the largest value.
double dominance_share(std::span<const double> values);

/// Sample Pearson correlation. Throws ZeroVariance if either input is constant.
double pearson(std::span<const double> x, std::span<const double> y);

struct RankedImpact {
  CountryId country;
  double impact = 0.0;
};

struct InequalityReport {
  double gini = 0.0;
  double dominance = 0.0;
  std::vector<RankedImpact> topk;  // descending by impact, ties by country
};

InequalityReport inequality_report(std::span<const CountryId> nodes, std::span<const double> impacts,
                                   std::size_t k);

/// Country x product export values with GDP per capita for each country.
class ComplexityTable {
public:
  ComplexityTable(std::vector<CountryId> countries, std::vector<ProductCode> products,
                  Matrix exports, Vector gdp_percap);

  /// E(c, p) = total exports of c in product p (codes truncated to
  /// `digit_level`) for `year`. Countries missing from `gdp_percap` are left
  /// out of the table; their count is reported through `dropped`.
  static ComplexityTable from_records(std::span<const TradeRecord> records, int year,
                                      std::size_t digit_level,
                                      const std::map<CountryId, double>& gdp_percap,
                                      std::size_t* dropped = nullptr);

  const std::vector<CountryId>& countries() const noexcept { return countries_; }
  const std::vector<ProductCode>& products() const noexcept { return products_; }
  const Matrix& exports() const noexcept { return exports_; }
  const Vector& gdp_percap() const noexcept { return gdp_; }

  std::size_t country_index(const CountryId& c) const;
  std::size_t product_index(const ProductCode& p) const;

private:
  std::vector<CountryId> countries_;
  std::vector<ProductCode> products_;
  Matrix exports_;
  Vector gdp_;
};

/// Share-normalised revealed comparative advantage:
///   RCA(c,p) = [E(c,p)/sum_p E(c,p)] / sum_c [E(c,p)/sum_p E(c,p)].
/// Throws NoExports when c exports nothing and NoMarket when no exporting
/// country has a positive share of p.
double rca(const ComplexityTable& table, const CountryId& c, const ProductCode& p);

/// PRODY(p) = sum_c Y_c RCA(c,p), over countries with nonzero total exports.
double prody(const ComplexityTable& table, const ProductCode& p);

}  // namespace flowallo
