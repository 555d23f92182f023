#pragma once

// Test-only helpers and independent oracles. Nothing here calls into the
// code paths the oracles are used to check.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "flowallo/netcore.hpp"

namespace flowallo::testing {

struct Edge {
  std::string from;
  std::string to;
  double weight;
};

/// Network over the union of edge endpoints, nodes sorted by name.
inline FlowNetwork network_from_edges(const std::vector<Edge>& edges, int year = 2000) {
  std::set<std::string> names;
  for (const auto& e : edges) {
    names.insert(e.from);
    names.insert(e.to);
  }
  std::vector<CountryId> nodes;
  for (const auto& n : names) nodes.push_back(CountryId::parse(n));
  std::sort(nodes.begin(), nodes.end());
  const auto n = static_cast<Eigen::Index>(nodes.size());
  Matrix flux = Matrix::Zero(n, n);
  auto index = [&](const std::string& s) {
    return static_cast<Eigen::Index>(std::find(nodes.begin(), nodes.end(), CountryId::parse(s)) - nodes.begin());
  };
  for (const auto& e : edges) flux(index(e.from), index(e.to)) += e.weight;
  return FlowNetwork(std::move(nodes), std::move(flux), ProductCode::parse("0"), year);
}

/// The 3-node worked example: 1->2: 2, 1->3: 1, 2->3: 1.
inline FlowNetwork worked_example() {
  return network_from_edges({{"N1", "N2", 2.0}, {"N1", "N3", 1.0}, {"N2", "N3", 1.0}});
}

inline TradeRecord record(int year, const char* from, const char* to, const char* product, double value) {
  return TradeRecord{year, CountryId::parse(from), CountryId::parse(to), ProductCode::parse(product), value, 0};
}

/// Pairwise GINI, sum_ij |x_i - x_j| / (2 n^2 mean), in long double.
inline double gini_pairwise(std::span<const double> x) {
  long double num = 0.0L;
  long double sum = 0.0L;
  for (double a : x) {
    sum += a;
    for (double b : x) num += std::fabs(static_cast<long double>(a) - b);
  }
  const long double n = static_cast<long double>(x.size());
  return static_cast<double>(num / (2.0L * n * sum));
}

struct OlsOracle {
  double slope;
  double intercept;
  double stderr_slope;
  double r2;
};

/// Least squares through the raw normal equations in long double: solve
/// [n sx; sx sxx] [a; b] = [sy; sxy] by Cramer's rule.
inline OlsOracle ols_oracle(std::span<const double> x, std::span<const double> y) {
  long double n = static_cast<long double>(x.size());
  long double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += static_cast<long double>(x[i]) * x[i];
    sxy += static_cast<long double>(x[i]) * y[i];
  }
  const long double det = n * sxx - sx * sx;
  const long double b = (n * sxy - sx * sy) / det;
  const long double a = (sy * sxx - sx * sxy) / det;
  long double sse = 0, sst = 0;
  const long double my = sy / n;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const long double r = y[i] - a - b * x[i];
    sse += r * r;
    sst += (y[i] - my) * (y[i] - my);
  }
  const long double var_x = sxx - sx * sx / n;
  return OlsOracle{static_cast<double>(b), static_cast<double>(a),
                   static_cast<double>(std::sqrt(sse / (n - 2) / var_x)),
                   static_cast<double>(1 - sse / sst)};
}

/// Log10 of both coordinates, then the OLS oracle.
inline OlsOracle loglog_oracle(std::span<const double> t, std::span<const double> c) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < t.size(); ++i) {
    x.push_back(std::log10(t[i]));
    y.push_back(std::log10(c[i]));
  }
  return ols_oracle(x, y);
}

/// Pearson r from the covariance definition in long double.
inline double pearson_oracle(std::span<const double> x, std::span<const double> y) {
  const long double n = static_cast<long double>(x.size());
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  long double cxy = 0, cxx = 0, cyy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    cxy += (x[i] - mx) * (y[i] - my);
    cxx += (x[i] - mx) * (x[i] - mx);
    cyy += (y[i] - my) * (y[i] - my);
  }
  return static_cast<double>(cxy / std::sqrt(cxx * cyy));
}

inline double rel_diff(double a, double b) {
  const double scale = std::max({std::fabs(a), std::fabs(b), 1e-300});
  return std::fabs(a - b) / scale;
}

}  // namespace flowallo::testing
