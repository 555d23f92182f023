#include "flowallo/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>
#include <variant>

#include "flowallo/error.hpp"
#include "flowallo/ingest.hpp"

namespace flowallo {

ProductResult analyze_product(const FlowNetwork& net, const BatchOptions& options) {
  if (net.size() < options.min_countries) {
    throw TooFewPoints(std::to_string(net.size()) + " countries, minimum is " +
                       std::to_string(options.min_countries));
  }
  const FlowAnalysis analysis = analyze(net, options.flow);
  ProductResult r;
  r.product = net.product();
  r.year = net.year();
  r.fit = fit(analysis.throughflow, analysis.impacts);
  r.n_countries = net.size();
  r.residual = throughflow_residual(analysis);
  const auto impacts = std::span<const double>(analysis.impacts.data(), net.size());
  const InequalityReport ineq = inequality_report(net.nodes(), impacts, options.top_k);
  r.gini = ineq.gini;
  r.dominance = ineq.dominance;
  r.topk = ineq.topk;
  return r;
}

namespace {

using Outcome = std::variant<ProductResult, SkippedProduct>;

Outcome run_one(std::span<const TradeRecord> records, const ProductSelection& product,
                const BatchOptions& options) {
  try {
    const auto built = build_network(records, product, options.year, options.digit_level, options.build);
    return analyze_product(built.network, options);
  } catch (const NumericalError& e) {
    return SkippedProduct{product, e.kind(), e.detail()};
  } catch (const EmptySelection& e) {
    return SkippedProduct{product, e.kind(), e.detail()};
  }
}

template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> workers;
  workers.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
}

}  // namespace

BatchReport batch(std::span<const TradeRecord> records, const BatchOptions& options) {
  if (options.min_countries < 3) throw InvalidValue("min_countries must be at least 3");
  std::vector<TradeRecord> year_records;
  for (const auto& r : records) {
    if (r.year == options.year) year_records.push_back(r);
  }
  if (year_records.empty()) {
    throw EmptySelection("no records in year " + std::to_string(options.year));
  }
  const auto codes = enumerate_products(year_records, options.digit_level);
  if (codes.empty()) {
    throw EmptySelection("no product codes at digit level " + std::to_string(options.digit_level));
  }

  std::vector<ProductSelection> tasks(codes.begin(), codes.end());
  tasks.push_back(std::nullopt);
  std::vector<std::optional<Outcome>> outcomes(tasks.size());
  // Tasks may throw only on programming errors; capture and rethrow the first.
  std::vector<std::exception_ptr> errors(tasks.size());
  parallel_for(tasks.size(), options.threads, [&](std::size_t i) {
    try {
      outcomes[i] = run_one(year_records, tasks[i], options);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  BatchReport report;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    auto& outcome = *outcomes[i];
    const bool is_integrated = !tasks[i].has_value();
    if (auto* result = std::get_if<ProductResult>(&outcome)) {
      if (is_integrated) {
        report.integrated = std::move(*result);
      } else {
        report.results.push_back(std::move(*result));
      }
    } else {
      report.skipped.push_back(std::get<SkippedProduct>(std::move(outcome)));
    }
  }
  return report;
}

std::string sector_of(const ProductCode& code) {
  return code.str().front() <= '4' ? "primary" : "manufactured";
}

Histogram histogram(std::span<const ProductResult> results, double bin_width, StackMode mode,
                    std::optional<double> origin) {
  if (results.empty()) throw InvalidValue("histogram of an empty result list");
  if (!(bin_width > 0.0) || !std::isfinite(bin_width)) throw InvalidValue("bin width must be positive");

  auto group_of = [mode](const ProductResult& r) -> std::string {
    switch (mode) {
      case StackMode::None: return "all";
      case StackMode::Prefix: return r.product ? r.product->str().substr(0, 1) : "ALL";
      case StackMode::Sector: return r.product ? sector_of(*r.product) : "ALL";
    }
    return "all";
  };

  Histogram h;
  h.width = bin_width;
  h.mode = mode;
  std::set<std::string> groups;
  if (mode == StackMode::Sector) groups = {"primary", "manufactured"};
  double lo = results.front().fit.eta;
  double hi = lo;
  for (const auto& r : results) {
    if (!std::isfinite(r.fit.eta)) throw InvalidValue("non-finite eta in histogram input");
    lo = std::min(lo, r.fit.eta);
    hi = std::max(hi, r.fit.eta);
    groups.insert(group_of(r));
  }
  if (origin) {
    h.origin = *origin;
  } else {
    h.origin = std::floor(lo / bin_width) * bin_width;
    if (h.origin > lo) h.origin -= bin_width;
  }
  if (lo < h.origin) throw InvalidValue("histogram origin lies above the smallest eta");
  if (mode == StackMode::Sector) {
    h.groups = {"primary", "manufactured"};
    for (const auto& g : groups) {
      if (g != "primary" && g != "manufactured") h.groups.push_back(g);
    }
  } else {
    h.groups.assign(groups.begin(), groups.end());
  }

  // Membership follows the emitted edges, so a value printed as an edge
  // lands in the bin that starts there.
  auto edge = [&](std::size_t k) { return h.origin + static_cast<double>(k) * bin_width; };
  auto bin_of = [&](double eta) {
    auto k = static_cast<std::size_t>(std::max(0.0, std::floor((eta - h.origin) / bin_width)));
    while (k > 0 && eta < edge(k)) --k;
    while (eta >= edge(k + 1)) ++k;
    return k;
  };
  const std::size_t nbins = bin_of(hi) + 1;
  h.bins.resize(nbins);
  for (std::size_t k = 0; k < nbins; ++k) {
    h.bins[k].lower = edge(k);
    h.bins[k].upper = edge(k + 1);
    for (const auto& g : h.groups) h.bins[k].counts[g] = 0;
  }
  for (const auto& r : results) {
    auto& bin = h.bins[bin_of(r.fit.eta)];
    ++bin.counts[group_of(r)];
    ++bin.total;
  }
  return h;
}

Timeseries timeseries(std::span<const TradeRecord> records, std::span<const int> years,
                      const BatchOptions& options) {
  if (years.empty()) throw InvalidValue("timeseries needs at least one year");
  Timeseries ts;
  ts.years.assign(years.begin(), years.end());
  std::sort(ts.years.begin(), ts.years.end());
  ts.years.erase(std::unique(ts.years.begin(), ts.years.end()), ts.years.end());

  std::map<ProductCode, std::vector<std::optional<double>>> per_product;
  std::vector<std::optional<double>> integrated(ts.years.size());
  for (std::size_t y = 0; y < ts.years.size(); ++y) {
    BatchOptions opts = options;
    opts.year = ts.years[y];
    BatchReport report;
    try {
      report = batch(records, opts);
    } catch (const EmptySelection&) {
      continue;  // the whole year is a gap
    }
    for (const auto& r : report.results) {
      auto& series = per_product[*r.product];
      series.resize(ts.years.size());
      series[y] = r.fit.eta;
    }
    for (const auto& s : report.skipped) {
      if (s.product) per_product[*s.product].resize(ts.years.size());
    }
    if (report.integrated) integrated[y] = report.integrated->fit.eta;
  }
  for (auto& [code, eta] : per_product) {
    eta.resize(ts.years.size());
    ts.series.push_back(Series{code, std::move(eta)});
  }
  ts.series.push_back(Series{std::nullopt, std::move(integrated)});
  return ts;
}

CorrelationResult correlate_complexity(std::span<const ProductResult> results,
                                       const std::map<ProductCode, double>& column,
                                       const std::set<ProductCode>& exclusions) {
  CorrelationResult out;
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& r : results) {
    if (!r.product) continue;
    const auto it = column.find(*r.product);
    if (it == column.end()) continue;
    if (exclusions.count(*r.product)) {
      ++out.excluded;
      continue;
    }
    out.pairs.push_back(CorrelationPair{*r.product, r.fit.eta, it->second});
    x.push_back(r.fit.eta);
    y.push_back(it->second);
  }
  if (out.pairs.size() < 3) {
    throw TooFewPoints(std::to_string(out.pairs.size()) + " products in common, need 3");
  }
  out.r = pearson(x, y);
  return out;
}

}  // namespace flowallo
