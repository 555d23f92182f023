#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include "flowallo/netcore.hpp"

namespace flowallo {

struct CsvFormat {
  char delimiter = ',';
};

/// Parses the canonical trades CSV (`year,exporter,importer,product,value`).
/// Blank lines and `#` comment lines are skipped; a `\r` before the newline
/// is tolerated. Throws
/// ParseError naming the 1-based data row and the offending column.
std::vector<TradeRecord> parse_trades(std::istream& in, const CsvFormat& format = {});

/// Writes records in the same canonical layout. Values use the shortest
/// representation that reads back to the identical double.
void write_trades(std::ostream& out, std::span<const TradeRecord> records,
                  const CsvFormat& format = {});

enum class AttributeKind {
  Any,           // finite real
  GdpPerCapita,  // strictly positive
  Ratio,         // within [0, 1]
};

struct CountryAttribute {
  CountryId country;
  double value = 0.0;
};

/// Parses a `country,value` table. Duplicate countries throw DuplicateCountry.
std::vector<CountryAttribute> parse_attributes(std::istream& in,
                                               AttributeKind kind = AttributeKind::Any);

std::map<CountryId, double> to_map(std::span<const CountryAttribute> attributes);

struct ProductValue {
  ProductCode product;
  double value = 0.0;
};

/// Parses a `product,value` table holding one real per product code (a
/// precomputed complexity column such as a foreign value-added ratio).
std::vector<ProductValue> parse_product_column(std::istream& in);

/// Distinct product codes truncated to `digit_level`, sorted ascending. Codes
/// shorter than the level are left out.
std::vector<ProductCode> enumerate_products(std::span<const TradeRecord> records,
                                            std::size_t digit_level);

/// Reads one product code per line; blank lines and `#` comments are ignored.
std::vector<ProductCode> parse_product_list(std::istream& in);

}  // namespace flowallo
