#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "flowallo/allometry.hpp"
#include "flowallo/backbone.hpp"
#include "flowallo/flowcalc.hpp"
#include "flowallo/metrics.hpp"
#include "flowallo/netcore.hpp"
#include "flowallo/pipeline.hpp"

namespace flowallo {

inline constexpr std::string_view kToolName = "flowallo";
inline constexpr std::string_view kToolVersion = "0.1.0";

enum class Format { Json, Csv, Dot };

Format parse_format(std::string_view text);

/// Trailing block every document carries: tool, command, parameters and the
/// numerical conventions behind the columns.
struct Metadata {
  std::string command;
  std::vector<std::pair<std::string, std::string>> parameters;
  std::vector<std::string> warnings;
};

struct AnalyzeReport {
  const FlowNetwork* network = nullptr;
  const FlowAnalysis* analysis = nullptr;
  AllometryFit fit;
  InequalityReport inequality;
};

std::string render_analyze(const AnalyzeReport& report, Format format, const Metadata& meta);
std::string render_batch(const BatchReport& report, Format format, const Metadata& meta);
std::string render_timeseries(const Timeseries& ts, Format format, const Metadata& meta);
std::string render_histogram(const Histogram& h, Format format, const Metadata& meta);

struct ProdyRow {
  ProductCode product;
  double prody = 0.0;
  std::size_t exporters = 0;
};

std::string render_prody(const std::vector<ProdyRow>& rows, Format format, const Metadata& meta);
std::string render_correlation(const CorrelationResult& result, Format format, const Metadata& meta);
std::string render_backbone(const FlowNetwork& net, const Backbone& bb, Format format,
                            const Metadata& meta);

/// Canonical trades CSV followed by `#` metadata lines, which the trades
/// reader skips, so the file reads back unchanged.
std::string render_trades(std::span<const TradeRecord> records, const Metadata& meta);

/// Batch rows in presentation order: descending eta, ties by code.
std::vector<const ProductResult*> presentation_order(const BatchReport& report);

}  // namespace flowallo
