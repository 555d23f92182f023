#include "flowallo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "flowallo/error.hpp"

namespace flowallo {

double gini(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) throw TooFewPoints("GINI needs at least 2 values");
  std::vector<double> sorted(values.begin(), values.end());
  for (double v : sorted) {
    if (!std::isfinite(v) || v < 0.0) throw InvalidValue("GINI values must be finite and nonnegative");
  }
  std::sort(sorted.begin(), sorted.end());
  double total = 0.0;
  double weighted = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += sorted[i];
    weighted += (2.0 * static_cast<double>(i + 1) - static_cast<double>(n) - 1.0) * sorted[i];
  }
  if (!(total > 0.0)) throw AllZero("every value is zero");
  return weighted / (static_cast<double>(n) * total);
}

double dominance_share(std::span<const double> values) {
  if (values.empty()) throw TooFewPoints("dominance share of an empty vector");
  double total = 0.0;
  double largest = values.front();
  for (double v : values) {
    total += v;
    largest = std::max(largest, v);
  }
  if (!(total > 0.0)) throw AllZero("total impact is not positive");
  return largest / total;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidValue("pearson inputs differ in length");
  const std::size_t n = x.size();
  if (n < 3) throw TooFewPoints("pearson needs at least 3 pairs");
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) throw ZeroVariance("pearson input has zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

InequalityReport inequality_report(std::span<const CountryId> nodes, std::span<const double> impacts,
                                   std::size_t k) {
  if (nodes.size() != impacts.size()) throw InvalidValue("node and impact lists differ in length");
  InequalityReport report;
  report.gini = gini(impacts);
  report.dominance = dominance_share(impacts);
  std::vector<std::size_t> order(nodes.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (impacts[a] != impacts[b]) return impacts[a] > impacts[b];
    return nodes[a] < nodes[b];
  });
  order.resize(std::min(k, order.size()));
  for (std::size_t i : order) report.topk.push_back(RankedImpact{nodes[i], impacts[i]});
  return report;
}

ComplexityTable::ComplexityTable(std::vector<CountryId> countries, std::vector<ProductCode> products,
                                 Matrix exports, Vector gdp_percap)
    : countries_(std::move(countries)), products_(std::move(products)),
      exports_(std::move(exports)), gdp_(std::move(gdp_percap)) {
  const auto nc = static_cast<Eigen::Index>(countries_.size());
  const auto np = static_cast<Eigen::Index>(products_.size());
  if (exports_.rows() != nc || exports_.cols() != np || gdp_.size() != nc) {
    throw InvalidValue("complexity table dimensions do not match its labels");
  }
  if (std::set<CountryId>(countries_.begin(), countries_.end()).size() != countries_.size()) {
    throw InvalidValue("duplicate country in complexity table");
  }
  if (std::set<ProductCode>(products_.begin(), products_.end()).size() != products_.size()) {
    throw InvalidValue("duplicate product in complexity table");
  }
  if (!exports_.allFinite() || (exports_.array() < 0.0).any()) {
    throw InvalidValue("export values must be finite and nonnegative");
  }
  if (!gdp_.allFinite() || (gdp_.array() <= 0.0).any()) {
    throw InvalidValue("GDP per capita must be positive");
  }
}

ComplexityTable ComplexityTable::from_records(std::span<const TradeRecord> records, int year,
                                              std::size_t digit_level,
                                              const std::map<CountryId, double>& gdp_percap,
                                              std::size_t* dropped) {
  if (digit_level < 1 || digit_level > 4) throw InvalidValue("digit level must be in 1..4");
  std::map<std::pair<CountryId, ProductCode>, std::vector<double>> cells;
  std::set<CountryId> missing;
  for (const auto& r : records) {
    if (r.year != year || r.exporter == r.importer) continue;
    const auto code = r.product.truncate(digit_level);
    if (!code) continue;
    if (!std::isfinite(r.value) || r.value < 0.0) throw NegativeFlow("negative export value");
    if (!gdp_percap.count(r.exporter)) {
      missing.insert(r.exporter);
      continue;
    }
    cells[{r.exporter, *code}].push_back(r.value);
  }
  if (dropped) *dropped = missing.size();
  if (cells.empty()) throw EmptySelection("no exports with GDP per capita in year " + std::to_string(year));

  std::set<CountryId> cs;
  std::set<ProductCode> ps;
  for (const auto& [key, values] : cells) {
    cs.insert(key.first);
    ps.insert(key.second);
  }
  std::vector<CountryId> countries(cs.begin(), cs.end());
  std::vector<ProductCode> products(ps.begin(), ps.end());
  Matrix exports = Matrix::Zero(static_cast<Eigen::Index>(countries.size()),
                                static_cast<Eigen::Index>(products.size()));
  Vector gdp(static_cast<Eigen::Index>(countries.size()));
  for (std::size_t i = 0; i < countries.size(); ++i) {
    gdp(static_cast<Eigen::Index>(i)) = gdp_percap.at(countries[i]);
  }
  for (auto& [key, values] : cells) {
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += v;
    const auto ci = std::lower_bound(countries.begin(), countries.end(), key.first) - countries.begin();
    const auto pi = std::lower_bound(products.begin(), products.end(), key.second) - products.begin();
    exports(ci, pi) = sum;
  }
  return ComplexityTable(std::move(countries), std::move(products), std::move(exports), std::move(gdp));
}

std::size_t ComplexityTable::country_index(const CountryId& c) const {
  const auto it = std::find(countries_.begin(), countries_.end(), c);
  if (it == countries_.end()) throw InvalidValue("unknown country " + c.str());
  return static_cast<std::size_t>(it - countries_.begin());
}

std::size_t ComplexityTable::product_index(const ProductCode& p) const {
  const auto it = std::find(products_.begin(), products_.end(), p);
  if (it == products_.end()) throw InvalidValue("unknown product " + p.str());
  return static_cast<std::size_t>(it - products_.begin());
}

namespace {

// Export shares E(c,p) / sum_p E(c,p) for product column p; zero for
// countries without any exports.
Vector product_shares(const ComplexityTable& table, Eigen::Index p) {
  const Vector totals = table.exports().rowwise().sum();
  Vector shares = Vector::Zero(totals.size());
  for (Eigen::Index c = 0; c < totals.size(); ++c) {
    if (totals(c) > 0.0) shares(c) = table.exports()(c, p) / totals(c);
  }
  return shares;
}

}  // namespace

double rca(const ComplexityTable& table, const CountryId& c, const ProductCode& p) {
  const auto ci = static_cast<Eigen::Index>(table.country_index(c));
  const auto pi = static_cast<Eigen::Index>(table.product_index(p));
  if (!(table.exports().row(ci).sum() > 0.0)) throw NoExports(c.str());
  const Vector shares = product_shares(table, pi);
  const double denom = shares.sum();
  if (!(denom > 0.0)) throw NoMarket(p.str());
  return shares(ci) / denom;
}

double prody(const ComplexityTable& table, const ProductCode& p) {
  const auto pi = static_cast<Eigen::Index>(table.product_index(p));
  const Vector shares = product_shares(table, pi);
  const double denom = shares.sum();
  if (!(denom > 0.0)) throw NoMarket(p.str());
  return table.gdp_percap().dot(shares) / denom;
}

}  // namespace flowallo
