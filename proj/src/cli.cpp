#include "flowallo/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "flowallo/allometry.hpp"
#include "flowallo/backbone.hpp"
#include "flowallo/error.hpp"
#include "flowallo/flowcalc.hpp"
#include "flowallo/ingest.hpp"
#include "flowallo/metrics.hpp"
#include "flowallo/numfmt.hpp"
#include "flowallo/pipeline.hpp"
#include "flowallo/report.hpp"
#include "flowallo/synth.hpp"

namespace flowallo {
namespace {

struct RunConfig {
  std::vector<std::string> inputs;
  std::vector<int> years;
  std::string product;
  std::optional<std::size_t> digits;
  std::optional<std::size_t> min_countries;
  double min_flow = 0.0;
  double alpha = 0.05;
  std::string format = "json";
  std::string exclude;
  std::string gdp;
  std::string complexity_column = "prody";
  std::uint64_t seed = 0;
  std::string out;
  std::size_t top = 10;
  std::size_t threads = 0;
  double bin_width = 0.05;
  std::string stack = "none";
  std::optional<double> origin;
  // synth
  std::string kind = "star";
  std::size_t nodes = 10;
  double weight = 1.0;
  double weight_min = 0.0;
  double weight_max = 100.0;
  double density = 0.5;
  double back_edges = 0.0;
};

std::string file_label(const std::string& path) {
  return std::filesystem::path(path).filename().string();
}

std::vector<TradeRecord> load_trades(const RunConfig& cfg) {
  std::vector<TradeRecord> all;
  for (const auto& path : cfg.inputs) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidValue("cannot open input file " + path);
    try {
      auto records = parse_trades(in);
      all.insert(all.end(), std::make_move_iterator(records.begin()),
                 std::make_move_iterator(records.end()));
    } catch (const ParseError& e) {
      throw ParseError(e.row(), e.column(), e.reason() + " in " + path);
    }
  }
  return all;
}

std::map<CountryId, double> load_gdp(const RunConfig& cfg) {
  if (cfg.gdp.empty()) throw InvalidValue("--gdp is required");
  std::ifstream in(cfg.gdp, std::ios::binary);
  if (!in) throw InvalidValue("cannot open GDP file " + cfg.gdp);
  const auto rows = parse_attributes(in, AttributeKind::GdpPerCapita);
  return to_map(rows);
}

int single_year(const RunConfig& cfg) {
  if (cfg.years.size() != 1) throw InvalidValue("exactly one --year is required");
  return cfg.years.front();
}

ProductSelection selected_product(const RunConfig& cfg) {
  if (cfg.product.empty() || cfg.product == "ALL" || cfg.product == "all") return std::nullopt;
  return ProductCode::parse(cfg.product);
}

// --digits defaults to the length of --product, otherwise 1.
std::size_t digit_level(const RunConfig& cfg, const ProductSelection& product) {
  if (product) {
    if (cfg.digits && *cfg.digits != product->level()) {
      throw InvalidValue("--product " + product->str() + " has " + std::to_string(product->level()) +
                         " digits but --digits is " + std::to_string(*cfg.digits));
    }
    return product->level();
  }
  const std::size_t d = cfg.digits.value_or(1);
  if (d < 1 || d > 4) throw InvalidValue("--digits must be in 1..4");
  return d;
}

Metadata base_meta(const std::string& command, const RunConfig& cfg) {
  Metadata m;
  m.command = command;
  std::string inputs;
  for (const auto& p : cfg.inputs) {
    if (!inputs.empty()) inputs += ';';
    inputs += file_label(p);
  }
  if (!inputs.empty()) m.parameters.emplace_back("input", inputs);
  return m;
}

BatchOptions batch_options(const RunConfig& cfg, std::size_t digits) {
  BatchOptions o;
  o.digit_level = digits;
  o.min_countries = cfg.min_countries.value_or(10);
  o.top_k = cfg.top;
  o.threads = cfg.threads;
  o.build.min_node_flow = cfg.min_flow;
  if (o.min_countries < 3) throw InvalidValue("--min-countries must be at least 3");
  return o;
}

void add_build_warnings(Metadata& meta, const BuildStats& stats) {
  if (stats.self_loops_dropped > 0) {
    meta.warnings.push_back("dropped " + std::to_string(stats.self_loops_dropped) +
                            " self-loop record(s) totalling " + format_double(stats.self_loop_value));
  }
  if (stats.short_codes_skipped > 0) {
    meta.warnings.push_back("skipped " + std::to_string(stats.short_codes_skipped) +
                            " record(s) with product codes shorter than the digit level");
  }
  if (stats.nodes_below_min_flow > 0) {
    meta.warnings.push_back("dropped " + std::to_string(stats.nodes_below_min_flow) +
                            " node(s) below the minimum flow");
  }
}

std::string cmd_analyze(const RunConfig& cfg, Metadata& meta) {
  const Format format = parse_format(cfg.format);
  const auto records = load_trades(cfg);
  const int year = single_year(cfg);
  const auto product = selected_product(cfg);
  const std::size_t digits = digit_level(cfg, product);
  meta.parameters.emplace_back("year", std::to_string(year));
  meta.parameters.emplace_back("product", to_string(product));
  meta.parameters.emplace_back("digits", std::to_string(digits));
  meta.parameters.emplace_back("min_flow", format_double(cfg.min_flow));

  BuildOptions build;
  build.min_node_flow = cfg.min_flow;
  const auto built = build_network(records, product, year, digits, build);
  add_build_warnings(meta, built.stats);
  if (cfg.min_countries && built.network.size() < *cfg.min_countries) {
    throw TooFewPoints(std::to_string(built.network.size()) + " countries, minimum is " +
                       std::to_string(*cfg.min_countries));
  }
  const FlowAnalysis analysis = analyze(built.network);
  AnalyzeReport report;
  report.network = &built.network;
  report.analysis = &analysis;
  report.fit = fit(analysis.throughflow, analysis.impacts);
  report.inequality = inequality_report(
      built.network.nodes(), std::span<const double>(analysis.impacts.data(), built.network.size()),
      cfg.top);
  return render_analyze(report, format, meta);
}

std::string cmd_batch(const RunConfig& cfg, Metadata& meta) {
  const Format format = parse_format(cfg.format);
  const auto records = load_trades(cfg);
  const int year = single_year(cfg);
  if (!cfg.product.empty()) throw InvalidValue("batch runs every product; drop --product");
  BatchOptions opts = batch_options(cfg, digit_level(cfg, std::nullopt));
  opts.year = year;
  meta.parameters.emplace_back("year", std::to_string(year));
  meta.parameters.emplace_back("digits", std::to_string(opts.digit_level));
  meta.parameters.emplace_back("min_countries", std::to_string(opts.min_countries));
  meta.parameters.emplace_back("min_flow", format_double(cfg.min_flow));
  const BatchReport report = batch(records, opts);
  return render_batch(report, format, meta);
}

std::string cmd_timeseries(const RunConfig& cfg, Metadata& meta) {
  const Format format = parse_format(cfg.format);
  const auto records = load_trades(cfg);
  std::vector<int> years = cfg.years;
  if (years.empty()) {
    for (const auto& r : records) years.push_back(r.year);
    std::sort(years.begin(), years.end());
    years.erase(std::unique(years.begin(), years.end()), years.end());
  }
  if (years.empty()) throw EmptySelection("input holds no records");
  BatchOptions opts = batch_options(cfg, digit_level(cfg, std::nullopt));
  meta.parameters.emplace_back("digits", std::to_string(opts.digit_level));
  meta.parameters.emplace_back("min_countries", std::to_string(opts.min_countries));
  const Timeseries ts = timeseries(records, years, opts);
  return render_timeseries(ts, format, meta);
}

StackMode parse_stack(const std::string& s) {
  if (s == "none") return StackMode::None;
  if (s == "prefix") return StackMode::Prefix;
  if (s == "sector") return StackMode::Sector;
  throw InvalidValue("--stack must be none, prefix or sector");
}

std::string cmd_histogram(const RunConfig& cfg, Metadata& meta) {
  const Format format = parse_format(cfg.format);
  const auto records = load_trades(cfg);
  BatchOptions opts = batch_options(cfg, digit_level(cfg, std::nullopt));
  opts.year = single_year(cfg);
  const StackMode mode = parse_stack(cfg.stack);
  meta.parameters.emplace_back("year", std::to_string(opts.year));
  meta.parameters.emplace_back("digits", std::to_string(opts.digit_level));
  meta.parameters.emplace_back("min_countries", std::to_string(opts.min_countries));
  meta.parameters.emplace_back("bin_width", format_double(cfg.bin_width));
  meta.parameters.emplace_back("stack", cfg.stack);
  const BatchReport report = batch(records, opts);
  if (report.results.empty()) throw TooFewPoints("no product produced an exponent");
  return render_histogram(histogram(report.results, cfg.bin_width, mode, cfg.origin), format, meta);
}

std::vector<ProdyRow> prody_rows(const ComplexityTable& table) {
  std::vector<ProdyRow> rows;
  for (std::size_t p = 0; p < table.products().size(); ++p) {
    const auto& code = table.products()[p];
    const auto col = table.exports().col(static_cast<Eigen::Index>(p));
    const auto exporters = static_cast<std::size_t>((col.array() > 0.0).count());
    if (exporters == 0) continue;
    rows.push_back(ProdyRow{code, prody(table, code), exporters});
  }
  return rows;
}

std::string cmd_prody(const RunConfig& cfg, Metadata& meta) {
  const Format format = parse_format(cfg.format);
  const auto records = load_trades(cfg);
  const int year = single_year(cfg);
  const std::size_t digits = digit_level(cfg, std::nullopt);
  const auto gdp = load_gdp(cfg);
  meta.parameters.emplace_back("year", std::to_string(year));
  meta.parameters.emplace_back("digits", std::to_string(digits));
  meta.parameters.emplace_back("gdp", file_label(cfg.gdp));
  std::size_t dropped = 0;
  const auto table = ComplexityTable::from_records(records, year, digits, gdp, &dropped);
  if (dropped > 0) {
    meta.warnings.push_back(std::to_string(dropped) + " exporter(s) without GDP per capita left out");
  }
  return render_prody(prody_rows(table), format, meta);
}

std::string cmd_correlate(const RunConfig& cfg, Metadata& meta) {
  const Format format = parse_format(cfg.format);
  const auto records = load_trades(cfg);
  BatchOptions opts = batch_options(cfg, digit_level(cfg, std::nullopt));
  opts.year = single_year(cfg);
  meta.parameters.emplace_back("year", std::to_string(opts.year));
  meta.parameters.emplace_back("digits", std::to_string(opts.digit_level));
  meta.parameters.emplace_back("min_countries", std::to_string(opts.min_countries));

  std::map<ProductCode, double> column;
  if (cfg.complexity_column == "prody") {
    const auto gdp = load_gdp(cfg);
    const auto table = ComplexityTable::from_records(records, opts.year, opts.digit_level, gdp);
    for (const auto& row : prody_rows(table)) column[row.product] = row.prody;
    meta.parameters.emplace_back("complexity_column", "prody");
    meta.parameters.emplace_back("gdp", file_label(cfg.gdp));
  } else {
    std::ifstream in(cfg.complexity_column, std::ios::binary);
    if (!in) throw InvalidValue("cannot open complexity column " + cfg.complexity_column);
    for (const auto& row : parse_product_column(in)) column[row.product] = row.value;
    meta.parameters.emplace_back("complexity_column", file_label(cfg.complexity_column));
  }
  std::set<ProductCode> exclusions;
  if (!cfg.exclude.empty()) {
    std::ifstream in(cfg.exclude, std::ios::binary);
    if (!in) throw InvalidValue("cannot open exclusion list " + cfg.exclude);
    for (auto& code : parse_product_list(in)) exclusions.insert(std::move(code));
    meta.parameters.emplace_back("exclude", file_label(cfg.exclude));
  }
  const BatchReport report = batch(records, opts);
  return render_correlation(correlate_complexity(report.results, column, exclusions), format, meta);
}

std::string cmd_backbone(const RunConfig& cfg, Metadata& meta) {
  const Format format = parse_format(cfg.format);
  const auto records = load_trades(cfg);
  const int year = single_year(cfg);
  const auto product = selected_product(cfg);
  const std::size_t digits = digit_level(cfg, product);
  if (!(cfg.alpha > 0.0 && cfg.alpha <= 1.0)) throw InvalidValue("--alpha must lie in (0, 1]");
  meta.parameters.emplace_back("year", std::to_string(year));
  meta.parameters.emplace_back("product", to_string(product));
  meta.parameters.emplace_back("digits", std::to_string(digits));
  meta.parameters.emplace_back("alpha", format_double(cfg.alpha));
  meta.parameters.emplace_back("rule", "local (1 - alpha) quantile of edge fractions, either endpoint");
  BuildOptions build;
  build.min_node_flow = cfg.min_flow;
  const auto built = build_network(records, product, year, digits, build);
  add_build_warnings(meta, built.stats);
  const Backbone bb = extract_backbone(built.network, cfg.alpha);
  return render_backbone(built.network, bb, format, meta);
}

std::string cmd_synth(const RunConfig& cfg) {
  SynthSpec spec;
  spec.kind = parse_synth_kind(cfg.kind);
  spec.n = cfg.nodes;
  spec.weight = cfg.weight;
  spec.weight_min = cfg.weight_min;
  spec.weight_max = cfg.weight_max;
  spec.density = cfg.density;
  spec.back_edge_ratio = cfg.back_edges;
  spec.seed = cfg.seed;
  spec.year = cfg.years.empty() ? 2000 : single_year(cfg);
  spec.product = ProductCode::parse(cfg.product.empty() ? "0" : cfg.product);
  const FlowNetwork net = generate_network(spec);
  Metadata meta;
  meta.command = "synth";
  meta.parameters.emplace_back("kind", std::string(to_string(spec.kind)));
  meta.parameters.emplace_back("nodes", std::to_string(spec.n));
  if (spec.kind == SynthKind::RandomFlow) {
    meta.parameters.emplace_back("weight_min", format_double(spec.weight_min));
    meta.parameters.emplace_back("weight_max", format_double(spec.weight_max));
    meta.parameters.emplace_back("density", format_double(spec.density));
    meta.parameters.emplace_back("back_edges", format_double(spec.back_edge_ratio));
  } else {
    meta.parameters.emplace_back("weight", format_double(spec.weight));
  }
  if (spec.kind == SynthKind::RandomFlow || spec.kind == SynthKind::RandomTree) {
    meta.parameters.emplace_back("seed", std::to_string(spec.seed));
  }
  meta.parameters.emplace_back("year", std::to_string(spec.year));
  meta.parameters.emplace_back("product", spec.product.str());
  return render_trades(to_records(net, spec.product), meta);
}

void emit(const RunConfig& cfg, const std::string& document, std::ostream& out) {
  if (cfg.out.empty() || cfg.out == "-") {
    out << document;
    out.flush();
    return;
  }
  std::ofstream file(cfg.out, std::ios::binary | std::ios::trunc);
  if (!file) throw InvalidValue("cannot write " + cfg.out);
  file << document;
  if (!file) throw InvalidValue("failed writing " + cfg.out);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Allometric scaling and impact analysis of trade flow networks", "flowallo"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  auto add_common = [&cfg](CLI::App* sub, bool needs_input) {
    auto* input = sub->add_option("--input", cfg.inputs, "Trades CSV (year,exporter,importer,product,value)");
    if (needs_input) input->required();
    sub->add_option("--year", cfg.years, "Calendar year")->take_all();
    sub->add_option("--format", cfg.format, "Output format");
    sub->add_option("--out", cfg.out, "Output file (default stdout)");
    sub->add_option("--min-flow", cfg.min_flow, "Drop nodes whose total flow is below this")
        ->check(CLI::NonNegativeNumber);
  };
  auto add_selection = [&cfg](CLI::App* sub) {
    sub->add_option("--digits", cfg.digits, "Product code digit level (1-4)")->check(CLI::Range(1, 4));
  };
  auto add_batch = [&cfg](CLI::App* sub) {
    sub->add_option("--min-countries", cfg.min_countries, "Smallest network analysed (default 10)");
    sub->add_option("--threads", cfg.threads, "Worker threads, 0 = hardware concurrency");
  };

  auto* analyze_cmd = app.add_subcommand("analyze", "Impacts and allometric exponent of one network");
  add_common(analyze_cmd, true);
  add_selection(analyze_cmd);
  analyze_cmd->add_option("--product", cfg.product, "Product code, or ALL for every product");
  analyze_cmd->add_option("--min-countries", cfg.min_countries, "Reject networks smaller than this");
  analyze_cmd->add_option("--top", cfg.top, "Number of ranked impacts to list");

  auto* batch_cmd = app.add_subcommand("batch", "Exponent table for every product at a digit level");
  add_common(batch_cmd, true);
  add_selection(batch_cmd);
  add_batch(batch_cmd);
  batch_cmd->add_option("--product", cfg.product)->group("");
  batch_cmd->add_option("--top", cfg.top, "Number of ranked impacts per product");

  auto* ts_cmd = app.add_subcommand("timeseries", "Exponent per product and year");
  add_common(ts_cmd, true);
  add_selection(ts_cmd);
  add_batch(ts_cmd);

  auto* hist_cmd = app.add_subcommand("histogram", "Distribution of exponents across products");
  add_common(hist_cmd, true);
  add_selection(hist_cmd);
  add_batch(hist_cmd);
  hist_cmd->add_option("--bin-width", cfg.bin_width, "Bin width")->check(CLI::PositiveNumber);
  hist_cmd->add_option("--stack", cfg.stack, "none, prefix (1-digit code) or sector (primary/manufactured)");
  hist_cmd->add_option("--origin", cfg.origin, "Lower edge of the first bin");

  auto* prody_cmd = app.add_subcommand("prody", "PRODY of every product");
  add_common(prody_cmd, true);
  add_selection(prody_cmd);
  prody_cmd->add_option("--gdp", cfg.gdp, "GDP per capita CSV (country,value)")->required();

  auto* corr_cmd = app.add_subcommand("correlate", "Pearson r between exponents and a complexity column");
  add_common(corr_cmd, true);
  add_selection(corr_cmd);
  add_batch(corr_cmd);
  corr_cmd->add_option("--complexity-column", cfg.complexity_column,
                       "'prody' (needs --gdp) or a product,value CSV");
  corr_cmd->add_option("--gdp", cfg.gdp, "GDP per capita CSV (country,value)");
  corr_cmd->add_option("--exclude", cfg.exclude, "File listing product codes to leave out");

  auto* bb_cmd = app.add_subcommand("backbone", "Backbone of one network as DOT or JSON node-link");
  add_common(bb_cmd, true);
  add_selection(bb_cmd);
  bb_cmd->add_option("--product", cfg.product, "Product code, or ALL");
  bb_cmd->add_option("--alpha", cfg.alpha, "Significance level in (0, 1]");

  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic network as a trades CSV");
  synth_cmd->add_option("--kind", cfg.kind, "star, chain, random_tree or random_flow");
  synth_cmd->add_option("--nodes", cfg.nodes, "Node count");
  synth_cmd->add_option("--weight", cfg.weight, "Edge weight (star, chain, random_tree)");
  synth_cmd->add_option("--weight-min", cfg.weight_min, "random_flow weights lie in (min, max]");
  synth_cmd->add_option("--weight-max", cfg.weight_max, "random_flow weights lie in (min, max]");
  synth_cmd->add_option("--density", cfg.density, "random_flow forward edge probability");
  synth_cmd->add_option("--back-edges", cfg.back_edges, "random_flow back edge ratio");
  synth_cmd->add_option("--seed", cfg.seed, "Random seed");
  synth_cmd->add_option("--year", cfg.years, "Year stamped on the records")->expected(1);
  synth_cmd->add_option("--product", cfg.product, "Product code stamped on the records");
  synth_cmd->add_option("--out", cfg.out, "Output file (default stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitInput;
  }

  try {
    std::string document;
    if (synth_cmd->parsed()) {
      document = cmd_synth(cfg);
    } else {
      Metadata meta;
      if (analyze_cmd->parsed()) {
        meta = base_meta("analyze", cfg);
        document = cmd_analyze(cfg, meta);
      } else if (batch_cmd->parsed()) {
        meta = base_meta("batch", cfg);
        document = cmd_batch(cfg, meta);
      } else if (ts_cmd->parsed()) {
        meta = base_meta("timeseries", cfg);
        document = cmd_timeseries(cfg, meta);
      } else if (hist_cmd->parsed()) {
        meta = base_meta("histogram", cfg);
        document = cmd_histogram(cfg, meta);
      } else if (prody_cmd->parsed()) {
        meta = base_meta("prody", cfg);
        document = cmd_prody(cfg, meta);
      } else if (corr_cmd->parsed()) {
        meta = base_meta("correlate", cfg);
        document = cmd_correlate(cfg, meta);
      } else if (bb_cmd->parsed()) {
        meta = base_meta("backbone", cfg);
        document = cmd_backbone(cfg, meta);
      }
      for (const auto& w : meta.warnings) err << "warning: " << w << '\n';
    }
    emit(cfg, document, out);
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitOk;
}

}  // namespace flowallo
