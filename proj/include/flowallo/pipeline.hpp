#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "flowallo/allometry.hpp"
#include "flowallo/flowcalc.hpp"
#include "flowallo/metrics.hpp"
#include "flowallo/netcore.hpp"

namespace flowallo {

struct ProductResult {
  ProductSelection product;  // nullopt for the integrated all-products network
  int year = 0;
  AllometryFit fit;
  double gini = 0.0;
  double dominance = 0.0;
  std::size_t n_countries = 0;
  double residual = 0.0;  // throughflow identity residual
  std::vector<RankedImpact> topk;
};

struct SkippedProduct {
  ProductSelection product;
  std::string reason;  // error kind, e.g. "TooFewPoints"
  std::string detail;
};

struct BatchOptions {
  int year = 0;
  std::size_t digit_level = 1;
  std::size_t min_countries = 10;
  std::size_t top_k = 10;
  /// Worker threads; 0 picks the hardware concurrency, 1 runs serially.
  std::size_t threads = 0;
  BuildOptions build;
  FlowOptions flow;
};

struct BatchReport {
  std::vector<ProductResult> results;        // ascending product code
  std::optional<ProductResult> integrated;   // every product summed into one network
  std::vector<SkippedProduct> skipped;       // ascending product code, ALL last
};

/// Analysis of one network: impacts, allometry fit and inequality. Throws
/// TooFewPoints when the network has fewer than `min_countries` nodes.
ProductResult analyze_product(const FlowNetwork& net, const BatchOptions& options);

/// One ProductResult per product code at the digit level, plus the integrated
/// network. Products that fail (too few countries, singular, degenerate fit)
/// go to the skip list with the error kind. Output does not depend on thread count.
BatchReport batch(std::span<const TradeRecord> records, const BatchOptions& options);

enum class StackMode { None, Prefix, Sector };

/// "primary" for 1-digit prefixes 0-4, "manufactured" for 5-9.
std::string sector_of(const ProductCode& code);

struct HistogramBin {
  double lower = 0.0;
  double upper = 0.0;
  std::map<std::string, std::size_t> counts;  // every group present in every bin
  std::size_t total = 0;
};

struct Histogram {
  double origin = 0.0;
  double width = 0.0;
  StackMode mode = StackMode::None;
  std::vector<std::string> groups;
  std::vector<HistogramBin> bins;
};

/// Left-closed bins [origin + k w, origin + (k + 1) w) of eta. Without an
/// explicit origin the first bin starts at floor(min eta / w) * w.
Histogram histogram(std::span<const ProductResult> results, double bin_width,
                    StackMode mode = StackMode::None, std::optional<double> origin = std::nullopt);

struct Series {
  ProductSelection product;
  std::vector<std::optional<double>> eta;  // aligned with Timeseries::years, nullopt = gap
};

struct Timeseries {
  std::vector<int> years;
  std::vector<Series> series;  // ascending product code, integrated network last
};

Timeseries timeseries(std::span<const TradeRecord> records, std::span<const int> years,
                      const BatchOptions& options);

struct CorrelationPair {
  ProductCode product;
  double eta = 0.0;
  double value = 0.0;
};

struct CorrelationResult {
  double r = 0.0;
  std::vector<CorrelationPair> pairs;
  std::size_t excluded = 0;
};

/// Inner join of per-product eta with a complexity column, minus the
/// exclusion list, then Pearson r. Throws TooFewPoints below three pairs.
CorrelationResult correlate_complexity(std::span<const ProductResult> results,
                                       const std::map<ProductCode, double>& column,
                                       const std::set<ProductCode>& exclusions);

}  // namespace flowallo
