#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace flowallo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Country (node) identifier. Stored uppercased; never empty, never contains whitespace.
class CountryId {
public:
  /// Uppercases and validates; throws InvalidValue on an empty or whitespace-bearing token.
  static CountryId parse(std::string_view text);

  const std::string& str() const noexcept { return code_; }

  friend auto operator<=>(const CountryId&, const CountryId&) = default;
  friend bool operator==(const CountryId&, const CountryId&) = default;

private:
  explicit CountryId(std::string code) : code_(std::move(code)) {}
  std::string code_;
};

/// Hierarchical product code of 1 to 4 decimal digits. A code contains every
/// code it is a prefix of.
class ProductCode {
public:
  static ProductCode parse(std::string_view text);

  const std::string& str() const noexcept { return digits_; }
  std::size_t level() const noexcept { return digits_.size(); }

  bool contains(const ProductCode& other) const noexcept;

  /// Prefix of the given length, or nullopt when this code is shorter than `level`.
  std::optional<ProductCode> truncate(std::size_t level) const;

  friend auto operator<=>(const ProductCode&, const ProductCode&) = default;
  friend bool operator==(const ProductCode&, const ProductCode&) = default;

private:
  explicit ProductCode(std::string digits) : digits_(std::move(digits)) {}
  std::string digits_;
};

/// A single product code, or nullopt for the integrated all-products network.
using ProductSelection = std::optional<ProductCode>;

std::string to_string(const ProductSelection& product);

/// One bilateral flow observation.
struct TradeRecord {
  int year = 0;
  CountryId exporter;
  CountryId importer;
  ProductCode product;
  double value = 0.0;
  std::size_t source_row = 0;  // 1-based data row in the originating file, 0 if synthetic

  bool same_fields(const TradeRecord& other) const noexcept {
    return year == other.year && exporter == other.exporter && importer == other.importer &&
           product == other.product && value == other.value;
  }
};

/// Node roster plus nonnegative flux matrix for one product and year.
/// flux(i, j) is the flow from node i to node j. Immutable once built.
class FlowNetwork {
public:
  /// Validates the invariants: unique nodes, square finite nonnegative flux
  /// with zero diagonal, and no isolated node. Throws InvalidValue otherwise.
  FlowNetwork(std::vector<CountryId> nodes, Matrix flux, ProductSelection product, int year);

  std::size_t size() const noexcept { return nodes_.size(); }
  const std::vector<CountryId>& nodes() const noexcept { return nodes_; }
  const Matrix& flux() const noexcept { return flux_; }
  const ProductSelection& product() const noexcept { return product_; }
  int year() const noexcept { return year_; }

  Vector inflow() const { return flux_.colwise().sum().transpose(); }
  Vector outflow() const { return flux_.rowwise().sum(); }

  /// Node k of the result is node perm[k] of this network.
  FlowNetwork permuted(std::span<const std::size_t> perm) const;

  FlowNetwork scaled(double factor) const;

private:
  std::vector<CountryId> nodes_;
  Matrix flux_;
  ProductSelection product_;
  int year_;
};

struct BuildOptions {
  /// Nodes whose total (in + out) flow is below this are dropped. Zero keeps
  /// every node with any flow at all.
  double min_node_flow = 0.0;
};

struct BuildStats {
  std::size_t matched_records = 0;
  std::size_t self_loops_dropped = 0;
  double self_loop_value = 0.0;
  std::size_t short_codes_skipped = 0;  // codes shorter than the digit level
  std::size_t nodes_below_min_flow = 0;
};

struct NetworkBuild {
  FlowNetwork network;
  BuildStats stats;
};

/// Aggregates the records of `year` whose product code truncated to
/// `digit_level` equals `product` (every code when `product` is nullopt) into
/// a flow network. Duplicate pairs are summed and self-loops dropped; nodes
/// are sorted lexicographically.
NetworkBuild build_network(std::span<const TradeRecord> records, const ProductSelection& product,
                           int year, std::size_t digit_level, const BuildOptions& options = {});

}  // namespace flowallo
