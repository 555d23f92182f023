#include "flowallo/report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "flowallo/error.hpp"
#include "flowallo/ingest.hpp"
#include "flowallo/numfmt.hpp"

namespace flowallo {

using ojson = nlohmann::ordered_json;

Format parse_format(std::string_view text) {
  if (text == "json") return Format::Json;
  if (text == "csv") return Format::Csv;
  if (text == "dot") return Format::Dot;
  throw InvalidValue("unknown format '" + std::string(text) + "'");
}

namespace {

const std::vector<std::pair<std::string, std::string>>& conventions() {
  static const std::vector<std::pair<std::string, std::string>> kConventions = {
      {"log_base", "10"},
      {"fit", "OLS of log10 C on log10 T with intercept"},
      {"stderr", "OLS slope standard error, n-2 degrees of freedom"},
      {"neutral_band", "|eta - 1| <= 2 stderr"},
      {"gini", "population form, sum |xi - xj| / (2 n^2 mean)"},
      {"throughflow", "T_i = max(inflow_i, outflow_i)"},
      {"balance", "T_k = S_k + sum_j m_jk T_j"},
      {"impact", "C_i = sum_k sum_j S_j u_ji u_ik / u_ii"},
  };
  return kConventions;
}

ojson metadata_json(const Metadata& meta) {
  ojson m;
  m["tool"] = std::string(kToolName);
  m["version"] = std::string(kToolVersion);
  m["command"] = meta.command;
  ojson params = ojson::object();
  for (const auto& [k, v] : meta.parameters) params[k] = v;
  m["parameters"] = params;
  ojson conv = ojson::object();
  for (const auto& [k, v] : conventions()) conv[k] = v;
  m["conventions"] = conv;
  m["warnings"] = meta.warnings;
  return m;
}

void metadata_lines(std::ostream& out, const Metadata& meta, std::string_view prefix) {
  out << prefix << "tool=" << kToolName << ' ' << kToolVersion << '\n';
  out << prefix << "command=" << meta.command << '\n';
  for (const auto& [k, v] : meta.parameters) out << prefix << "param." << k << '=' << v << '\n';
  for (const auto& [k, v] : conventions()) out << prefix << "convention." << k << '=' << v << '\n';
  for (const auto& w : meta.warnings) out << prefix << "warning=" << w << '\n';
}

std::string finish_json(ojson doc, const Metadata& meta) {
  doc["metadata"] = metadata_json(meta);
  return doc.dump(2) + "\n";
}

std::string num(double v) { return std::isfinite(v) ? format_double(v) : std::string(); }

ojson jnum(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

void require(Format format, std::initializer_list<Format> allowed, std::string_view what) {
  if (std::find(allowed.begin(), allowed.end(), format) == allowed.end()) {
    throw InvalidValue("format not supported for " + std::string(what));
  }
}

ojson fit_json(const AllometryFit& f) {
  ojson j;
  j["eta"] = jnum(f.eta);
  j["stderr"] = jnum(f.stderr_eta);
  j["intercept"] = jnum(f.intercept);
  j["r2"] = jnum(f.r2);
  j["n"] = f.n;
  j["classification"] = std::string(to_string(f.classification));
  return j;
}

ojson topk_json(const std::vector<RankedImpact>& topk) {
  ojson arr = ojson::array();
  for (const auto& t : topk) arr.push_back(ojson{{"country", t.country.str()}, {"C", jnum(t.impact)}});
  return arr;
}

ojson result_json(const ProductResult& r) {
  ojson j;
  j["product"] = to_string(r.product);
  j["year"] = r.year;
  j["n"] = r.n_countries;
  const ojson fj = fit_json(r.fit);
  for (const auto& [k, v] : fj.items()) {
    if (k != "n") j[k] = v;
  }
  j["gini"] = jnum(r.gini);
  j["dominance"] = jnum(r.dominance);
  j["residual"] = jnum(r.residual);
  j["topk"] = topk_json(r.topk);
  return j;
}

}  // namespace

std::string render_analyze(const AnalyzeReport& report, Format format, const Metadata& meta) {
  require(format, {Format::Json, Format::Csv}, "analyze");
  const FlowNetwork& net = *report.network;
  const FlowAnalysis& a = *report.analysis;
  const std::size_t n = net.size();
  const double residual = throughflow_residual(a);

  if (format == Format::Json) {
    ojson doc;
    doc["product"] = to_string(net.product());
    doc["year"] = net.year();
    doc["n"] = n;
    const ojson fj = fit_json(report.fit);
    for (const auto& [k, v] : fj.items()) {
      if (k != "n") doc[k] = v;
    }
    doc["gini"] = jnum(report.inequality.gini);
    doc["dominance"] = jnum(report.inequality.dominance);
    doc["residual"] = jnum(residual);
    doc["topk"] = topk_json(report.inequality.topk);
    ojson nodes = ojson::array();
    for (std::size_t i = 0; i < n; ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      nodes.push_back(ojson{{"country", net.nodes()[i].str()},
                            {"T", jnum(a.throughflow(k))},
                            {"S", jnum(a.sources(k))},
                            {"C", jnum(a.impacts(k))},
                            {"log10_T", jnum(std::log10(a.throughflow(k)))},
                            {"log10_C", jnum(std::log10(a.impacts(k)))}});
    }
    doc["nodes"] = nodes;
    return finish_json(std::move(doc), meta);
  }

  std::ostringstream out;
  const auto& f = report.fit;
  out << "product,year,n,eta,stderr,intercept,r2,classification,gini,dominance,residual\n";
  out << to_string(net.product()) << ',' << net.year() << ',' << n << ',' << num(f.eta) << ','
      << num(f.stderr_eta) << ',' << num(f.intercept) << ',' << num(f.r2) << ','
      << to_string(f.classification) << ',' << num(report.inequality.gini) << ','
      << num(report.inequality.dominance) << ',' << num(residual) << '\n';
  out << '\n';
  out << "rank,country,T,S,C,log10_T,log10_C\n";
  // Node rows in descending-impact order; rank 1 is the top impact.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    const double cx = a.impacts(static_cast<Eigen::Index>(x));
    const double cy = a.impacts(static_cast<Eigen::Index>(y));
    if (cx != cy) return cx > cy;
    return net.nodes()[x] < net.nodes()[y];
  });
  for (std::size_t r = 0; r < n; ++r) {
    const auto k = static_cast<Eigen::Index>(order[r]);
    out << r + 1 << ',' << net.nodes()[order[r]].str() << ',' << num(a.throughflow(k)) << ','
        << num(a.sources(k)) << ',' << num(a.impacts(k)) << ',' << num(std::log10(a.throughflow(k)))
        << ',' << num(std::log10(a.impacts(k))) << '\n';
  }
  metadata_lines(out, meta, "# ");
  return out.str();
}

std::string render_trades(std::span<const TradeRecord> records, const Metadata& meta) {
  std::ostringstream out;
  write_trades(out, records);
  metadata_lines(out, meta, "# ");
  return out.str();
}

std::vector<const ProductResult*> presentation_order(const BatchReport& report) {
  std::vector<const ProductResult*> rows;
  for (const auto& r : report.results) rows.push_back(&r);
  std::stable_sort(rows.begin(), rows.end(), [](const ProductResult* x, const ProductResult* y) {
    if (x->fit.eta != y->fit.eta) return x->fit.eta > y->fit.eta;
    return x->product < y->product;
  });
  if (report.integrated) rows.push_back(&*report.integrated);
  return rows;
}

std::string render_batch(const BatchReport& report, Format format, const Metadata& meta) {
  require(format, {Format::Json, Format::Csv}, "batch");
  const auto rows = presentation_order(report);
  if (format == Format::Json) {
    ojson doc;
    ojson results = ojson::array();
    for (const auto* r : rows) results.push_back(result_json(*r));
    doc["results"] = results;
    ojson skipped = ojson::array();
    for (const auto& s : report.skipped) {
      skipped.push_back(ojson{{"product", to_string(s.product)}, {"reason", s.reason}, {"detail", s.detail}});
    }
    doc["skipped"] = skipped;
    return finish_json(std::move(doc), meta);
  }
  std::ostringstream out;
  out << "code,eta,stderr,r2,gini,dominance,n\n";
  for (const auto* r : rows) {
    out << to_string(r->product) << ',' << num(r->fit.eta) << ',' << num(r->fit.stderr_eta) << ','
        << num(r->fit.r2) << ',' << num(r->gini) << ',' << num(r->dominance) << ',' << r->n_countries
        << '\n';
  }
  for (const auto& s : report.skipped) {
    out << "# skipped=" << to_string(s.product) << ':' << s.reason << '\n';
  }
  metadata_lines(out, meta, "# ");
  return out.str();
}

std::string render_timeseries(const Timeseries& ts, Format format, const Metadata& meta) {
  require(format, {Format::Json, Format::Csv}, "timeseries");
  if (format == Format::Json) {
    ojson doc;
    doc["years"] = ts.years;
    ojson series = ojson::array();
    for (const auto& s : ts.series) {
      ojson eta = ojson::array();
      for (const auto& v : s.eta) eta.push_back(v ? jnum(*v) : ojson(nullptr));
      series.push_back(ojson{{"product", to_string(s.product)}, {"eta", eta}});
    }
    doc["series"] = series;
    return finish_json(std::move(doc), meta);
  }
  std::ostringstream out;
  out << "product,year,eta\n";
  for (const auto& s : ts.series) {
    for (std::size_t y = 0; y < ts.years.size(); ++y) {
      out << to_string(s.product) << ',' << ts.years[y] << ',' << (s.eta[y] ? num(*s.eta[y]) : "")
          << '\n';
    }
  }
  metadata_lines(out, meta, "# ");
  return out.str();
}

namespace {

std::string_view stack_name(StackMode m) {
  switch (m) {
    case StackMode::None: return "none";
    case StackMode::Prefix: return "prefix";
    case StackMode::Sector: return "sector";
  }
  return "none";
}

}  // namespace

std::string render_histogram(const Histogram& h, Format format, const Metadata& meta) {
  require(format, {Format::Json, Format::Csv}, "histogram");
  if (format == Format::Json) {
    ojson doc;
    doc["origin"] = h.origin;
    doc["width"] = h.width;
    doc["stack"] = std::string(stack_name(h.mode));
    doc["groups"] = h.groups;
    ojson bins = ojson::array();
    for (const auto& b : h.bins) {
      ojson counts = ojson::object();
      for (const auto& g : h.groups) counts[g] = b.counts.at(g);
      bins.push_back(ojson{{"lower", b.lower}, {"upper", b.upper}, {"total", b.total}, {"counts", counts}});
    }
    doc["bins"] = bins;
    return finish_json(std::move(doc), meta);
  }
  std::ostringstream out;
  out << "lower,upper,total";
  for (const auto& g : h.groups) out << ',' << g;
  out << '\n';
  for (const auto& b : h.bins) {
    out << num(b.lower) << ',' << num(b.upper) << ',' << b.total;
    for (const auto& g : h.groups) out << ',' << b.counts.at(g);
    out << '\n';
  }
  metadata_lines(out, meta, "# ");
  return out.str();
}

std::string render_prody(const std::vector<ProdyRow>& rows, Format format, const Metadata& meta) {
  require(format, {Format::Json, Format::Csv}, "prody");
  if (format == Format::Json) {
    ojson doc;
    ojson arr = ojson::array();
    for (const auto& r : rows) {
      arr.push_back(ojson{{"product", r.product.str()}, {"prody", jnum(r.prody)}, {"exporters", r.exporters}});
    }
    doc["products"] = arr;
    return finish_json(std::move(doc), meta);
  }
  std::ostringstream out;
  out << "product,prody,exporters\n";
  for (const auto& r : rows) out << r.product.str() << ',' << num(r.prody) << ',' << r.exporters << '\n';
  metadata_lines(out, meta, "# ");
  return out.str();
}

std::string render_correlation(const CorrelationResult& result, Format format, const Metadata& meta) {
  require(format, {Format::Json, Format::Csv}, "correlate");
  if (format == Format::Json) {
    ojson doc;
    doc["r"] = jnum(result.r);
    doc["n"] = result.pairs.size();
    doc["excluded"] = result.excluded;
    ojson pairs = ojson::array();
    for (const auto& p : result.pairs) {
      pairs.push_back(ojson{{"product", p.product.str()}, {"eta", jnum(p.eta)}, {"value", jnum(p.value)}});
    }
    doc["pairs"] = pairs;
    return finish_json(std::move(doc), meta);
  }
  std::ostringstream out;
  out << "r,n,excluded\n" << num(result.r) << ',' << result.pairs.size() << ',' << result.excluded << "\n\n";
  out << "product,eta,value\n";
  for (const auto& p : result.pairs) out << p.product.str() << ',' << num(p.eta) << ',' << num(p.value) << '\n';
  metadata_lines(out, meta, "# ");
  return out.str();
}

namespace {

std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string render_backbone(const FlowNetwork& net, const Backbone& bb, Format format,
                            const Metadata& meta) {
  require(format, {Format::Json, Format::Dot}, "backbone");
  const auto& nodes = net.nodes();
  if (format == Format::Json) {
    ojson doc;
    doc["directed"] = true;
    doc["product"] = to_string(net.product());
    doc["year"] = net.year();
    doc["alpha"] = bb.alpha;
    ojson jn = ojson::array();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      jn.push_back(ojson{{"id", nodes[i].str()},
                         {"role", bb.roles[i] == NodeRole::Exporter ? "exporter" : "importer"},
                         {"volume", jnum(bb.node_volume[i])}});
    }
    doc["nodes"] = jn;
    ojson links = ojson::array();
    for (const auto& [i, j] : bb.kept) {
      links.push_back(ojson{{"source", nodes[i].str()},
                            {"target", nodes[j].str()},
                            {"weight", jnum(net.flux()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)))}});
    }
    doc["links"] = links;
    return finish_json(std::move(doc), meta);
  }

  const double max_volume = *std::max_element(bb.node_volume.begin(), bb.node_volume.end());
  double max_weight = 0.0;
  for (const auto& [i, j] : bb.kept) {
    max_weight = std::max(max_weight, net.flux()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
  }
  std::ostringstream out;
  out << "digraph backbone {\n";
  out << "  graph [label=" << dot_quote("product " + to_string(net.product()) + ", year " +
                                       std::to_string(net.year()) + ", alpha " + format_double(bb.alpha))
      << "];\n";
  out << "  node [shape=circle, style=filled, fixedsize=true, fontsize=8];\n";
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    // Node area proportional to total trade volume.
    const double width = 0.2 + 1.8 * std::sqrt(bb.node_volume[i] / max_volume);
    const bool exporter = bb.roles[i] == NodeRole::Exporter;
    out << "  " << dot_quote(nodes[i].str()) << " [width=" << format_double(std::round(width * 1e4) / 1e4)
        << ", fillcolor=" << (exporter ? "\"#d62728\"" : "\"#1f77b4\"")
        << ", role=" << (exporter ? "exporter" : "importer")
        << ", volume=" << dot_quote(format_double(bb.node_volume[i])) << "];\n";
  }
  for (const auto& [i, j] : bb.kept) {
    const double w = net.flux()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    const double pen = max_weight > 0.0 ? 0.5 + 4.5 * w / max_weight : 1.0;
    out << "  " << dot_quote(nodes[i].str()) << " -> " << dot_quote(nodes[j].str())
        << " [weight=" << dot_quote(format_double(w))
        << ", penwidth=" << format_double(std::round(pen * 1e4) / 1e4) << "];\n";
  }
  out << "}\n";
  metadata_lines(out, meta, "// ");
  return out.str();
}

}  // namespace flowallo
