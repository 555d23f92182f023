#include "flowallo/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <string>
#include <string_view>

#include "flowallo/error.hpp"
#include "flowallo/numfmt.hpp"

namespace flowallo {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return fields;
}

// Line reader that strips a UTF-8 BOM, tracks data row numbers, and skips blank lines.
class CsvReader {
public:
  CsvReader(std::istream& in, char delim) : in_(in), delim_(delim) {}

  void expect_header(std::span<const std::string_view> names) {
    std::string line;
    while (std::getline(in_, line)) {
      std::string_view view = line;
      if (first_ && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
      first_ = false;
      if (trim(view).empty()) continue;
      const auto fields = split(view, delim_);
      if (!std::equal(fields.begin(), fields.end(), names.begin(), names.end())) {
        std::string expected;
        for (auto name : names) {
          if (!expected.empty()) expected += delim_;
          expected += name;
        }
        throw ParseError(0, "header", "expected header '" + expected + "'");
      }
      return;
    }
    throw ParseError(0, "header", "missing header");
  }

  // Returns false at end of input.
  bool next(std::vector<std::string_view>& fields, std::size_t expected_columns) {
    while (std::getline(in_, line_)) {
      const auto view = trim(line_);
      if (view.empty() || view.front() == '#') continue;
      ++row_;
      fields = split(line_, delim_);
      if (fields.size() != expected_columns) {
        throw ParseError(row_, "row", "expected " + std::to_string(expected_columns) +
                                          " columns, found " + std::to_string(fields.size()));
      }
      return true;
    }
    return false;
  }

  std::size_t row() const noexcept { return row_; }

private:
  std::istream& in_;
  char delim_;
  bool first_ = true;
  std::string line_;
  std::size_t row_ = 0;
};

template <typename Fn>
auto field(std::size_t row, const char* column, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ParseError&) {
    throw;
  } catch (const InputError& e) {
    throw ParseError(row, column, e.what());
  }
}

double parse_value(std::size_t row, std::string_view text, const char* column) {
  const auto v = parse_double(text);
  if (!v || !std::isfinite(*v)) {
    throw ParseError(row, column, "'" + std::string(text) + "' is not a finite number");
  }
  return *v;
}

}  // namespace

std::vector<TradeRecord> parse_trades(std::istream& in, const CsvFormat& format) {
  static constexpr std::string_view kHeader[] = {"year", "exporter", "importer", "product", "value"};
  CsvReader reader(in, format.delimiter);
  reader.expect_header(kHeader);

  std::vector<TradeRecord> records;
  std::vector<std::string_view> f;
  while (reader.next(f, 5)) {
    const std::size_t row = reader.row();
    const auto year = parse_integer(f[0]);
    if (!year || *year < -9999 || *year > 9999) {
      throw ParseError(row, "year", "'" + std::string(f[0]) + "' is not a calendar year");
    }
    auto exporter = field(row, "exporter", [&] { return CountryId::parse(f[1]); });
    auto importer = field(row, "importer", [&] { return CountryId::parse(f[2]); });
    auto product = field(row, "product", [&] { return ProductCode::parse(f[3]); });
    const double value = parse_value(row, f[4], "value");
    if (value < 0.0) throw ParseError(row, "value", "negative trade value");
    records.push_back(TradeRecord{static_cast<int>(*year), std::move(exporter), std::move(importer),
                                  std::move(product), value, row});
  }
  return records;
}

void write_trades(std::ostream& out, std::span<const TradeRecord> records, const CsvFormat& format) {
  const char d = format.delimiter;
  out << "year" << d << "exporter" << d << "importer" << d << "product" << d << "value\n";
  for (const auto& r : records) {
    out << r.year << d << r.exporter.str() << d << r.importer.str() << d << r.product.str() << d
        << format_double(r.value) << '\n';
  }
}

std::vector<CountryAttribute> parse_attributes(std::istream& in, AttributeKind kind) {
  static constexpr std::string_view kHeader[] = {"country", "value"};
  CsvReader reader(in, ',');
  reader.expect_header(kHeader);

  std::vector<CountryAttribute> rows;
  std::set<CountryId> seen;
  std::vector<std::string_view> f;
  while (reader.next(f, 2)) {
    const std::size_t row = reader.row();
    auto country = field(row, "country", [&] { return CountryId::parse(f[0]); });
    const double value = parse_value(row, f[1], "value");
    if (kind == AttributeKind::GdpPerCapita && value <= 0.0) {
      throw ParseError(row, "value", "GDP per capita must be positive");
    }
    if (kind == AttributeKind::Ratio && (value < 0.0 || value > 1.0)) {
      throw ParseError(row, "value", "ratio must lie in [0, 1]");
    }
    if (!seen.insert(country).second) throw DuplicateCountry(country.str());
    rows.push_back(CountryAttribute{std::move(country), value});
  }
  return rows;
}

std::map<CountryId, double> to_map(std::span<const CountryAttribute> attributes) {
  std::map<CountryId, double> out;
  for (const auto& a : attributes) {
    if (!out.emplace(a.country, a.value).second) throw DuplicateCountry(a.country.str());
  }
  return out;
}

std::vector<ProductValue> parse_product_column(std::istream& in) {
  static constexpr std::string_view kHeader[] = {"product", "value"};
  CsvReader reader(in, ',');
  reader.expect_header(kHeader);

  std::vector<ProductValue> rows;
  std::set<ProductCode> seen;
  std::vector<std::string_view> f;
  while (reader.next(f, 2)) {
    const std::size_t row = reader.row();
    auto product = field(row, "product", [&] { return ProductCode::parse(f[0]); });
    const double value = parse_value(row, f[1], "value");
    if (!seen.insert(product).second) {
      throw ParseError(row, "product", "duplicate product " + product.str());
    }
    rows.push_back(ProductValue{std::move(product), value});
  }
  return rows;
}

std::vector<ProductCode> enumerate_products(std::span<const TradeRecord> records,
                                            std::size_t digit_level) {
  if (digit_level < 1 || digit_level > 4) throw InvalidValue("digit level must be in 1..4");
  std::set<ProductCode> codes;
  for (const auto& r : records) {
    if (auto code = r.product.truncate(digit_level)) codes.insert(std::move(*code));
  }
  return {codes.begin(), codes.end()};
}

std::vector<ProductCode> parse_product_list(std::istream& in) {
  std::vector<ProductCode> out;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    auto view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    out.push_back(field(row, "product", [&] { return ProductCode::parse(view); }));
  }
  return out;
}

}  // namespace flowallo
