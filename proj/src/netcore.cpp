#include "flowallo/netcore.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>

#include "flowallo/error.hpp"

namespace flowallo {

CountryId CountryId::parse(std::string_view text) {
  if (text.empty()) throw InvalidValue("country code is empty");
  std::string code;
  code.reserve(text.size());
  for (char ch : text) {
    const auto uch = static_cast<unsigned char>(ch);
    if (std::isspace(uch) || std::iscntrl(uch)) {
      throw InvalidValue("country code '" + std::string(text) + "' contains whitespace");
    }
    code.push_back(static_cast<char>(std::toupper(uch)));
  }
  return CountryId(std::move(code));
}

ProductCode ProductCode::parse(std::string_view text) {
  if (text.empty() || text.size() > 4) {
    throw InvalidValue("product code '" + std::string(text) + "' must have 1 to 4 digits");
  }
  for (char ch : text) {
    if (ch < '0' || ch > '9') {
      throw InvalidValue("product code '" + std::string(text) + "' is not all digits");
    }
  }
  return ProductCode(std::string(text));
}

bool ProductCode::contains(const ProductCode& other) const noexcept {
  return other.digits_.size() >= digits_.size() &&
         other.digits_.compare(0, digits_.size(), digits_) == 0;
}

std::optional<ProductCode> ProductCode::truncate(std::size_t level) const {
  if (level == 0 || digits_.size() < level) return std::nullopt;
  return ProductCode(digits_.substr(0, level));
}

std::string to_string(const ProductSelection& product) {
  return product ? product->str() : std::string("ALL");
}

FlowNetwork::FlowNetwork(std::vector<CountryId> nodes, Matrix flux, ProductSelection product,
                         int year)
    : nodes_(std::move(nodes)), flux_(std::move(flux)), product_(std::move(product)), year_(year) {
  const auto n = static_cast<Eigen::Index>(nodes_.size());
  if (flux_.rows() != n || flux_.cols() != n) {
    throw InvalidValue("flux matrix shape does not match node count");
  }
  std::set<CountryId> seen(nodes_.begin(), nodes_.end());
  if (seen.size() != nodes_.size()) throw InvalidValue("duplicate node in flow network");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (flux_(i, i) != 0.0) throw InvalidValue("self-flow on node " + nodes_[i].str());
    for (Eigen::Index j = 0; j < n; ++j) {
      const double f = flux_(i, j);
      if (!std::isfinite(f) || f < 0.0) {
        throw InvalidValue("flux entry must be finite and nonnegative");
      }
    }
  }
  const Vector in = inflow();
  const Vector out = outflow();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (in(i) <= 0.0 && out(i) <= 0.0) throw InvalidValue("isolated node " + nodes_[i].str());
  }
}

FlowNetwork FlowNetwork::permuted(std::span<const std::size_t> perm) const {
  const auto n = size();
  if (perm.size() != n) throw InvalidValue("permutation length mismatch");
  std::vector<CountryId> nodes;
  nodes.reserve(n);
  Matrix flux(n, n);
  for (std::size_t a = 0; a < n; ++a) {
    if (perm[a] >= n) throw InvalidValue("permutation index out of range");
    nodes.push_back(nodes_[perm[a]]);
    for (std::size_t b = 0; b < n; ++b) {
      flux(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
          flux_(static_cast<Eigen::Index>(perm[a]), static_cast<Eigen::Index>(perm[b]));
    }
  }
  return FlowNetwork(std::move(nodes), std::move(flux), product_, year_);
}

FlowNetwork FlowNetwork::scaled(double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor)) throw InvalidValue("scale factor must be positive");
  return FlowNetwork(nodes_, flux_ * factor, product_, year_);
}

NetworkBuild build_network(std::span<const TradeRecord> records, const ProductSelection& product,
                           int year, std::size_t digit_level, const BuildOptions& options) {
  if (digit_level < 1 || digit_level > 4) throw InvalidValue("digit level must be in 1..4");
  if (product && product->level() != digit_level) {
    throw InvalidValue("product code " + product->str() + " does not match digit level " +
                       std::to_string(digit_level));
  }

  BuildStats stats;
  std::map<std::pair<CountryId, CountryId>, std::vector<double>> shards;
  for (const TradeRecord& rec : records) {
    if (!std::isfinite(rec.value) || rec.value < 0.0) {
      throw NegativeFlow("record at row " + std::to_string(rec.source_row) + " has value " +
                         std::to_string(rec.value));
    }
    if (rec.year != year) continue;
    const auto code = rec.product.truncate(digit_level);
    if (!code) {
      ++stats.short_codes_skipped;
      continue;
    }
    if (product && *code != *product) continue;
    ++stats.matched_records;
    if (rec.exporter == rec.importer) {
      ++stats.self_loops_dropped;
      stats.self_loop_value += rec.value;
      continue;
    }
    shards[{rec.exporter, rec.importer}].push_back(rec.value);
  }
  if (stats.matched_records == 0) {
    throw EmptySelection("no records for product " + to_string(product) + " in year " +
                         std::to_string(year));
  }

  // Shards are summed in sorted order so the result does not depend on record order.
  std::map<std::pair<CountryId, CountryId>, double> pairs;
  for (auto& [key, values] : shards) {
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += v;
    pairs.emplace(key, sum);
  }

  // Node totals drive stripping; the minimum-flow filter is applied once and
  // nodes it isolates are stripped afterwards.
  std::map<CountryId, double> totals;
  for (const auto& [key, value] : pairs) {
    totals[key.first] += value;
    totals[key.second] += value;
  }
  std::set<CountryId> keep;
  for (const auto& [node, total] : totals) {
    if (total > 0.0 && total >= options.min_node_flow) {
      keep.insert(node);
    } else if (total > 0.0) {
      ++stats.nodes_below_min_flow;
    }
  }
  std::map<CountryId, double> remaining;
  for (const auto& [key, value] : pairs) {
    if (value > 0.0 && keep.count(key.first) && keep.count(key.second)) {
      remaining[key.first] += value;
      remaining[key.second] += value;
    }
  }

  std::vector<CountryId> nodes;
  for (const auto& [node, total] : remaining) {
    if (total > 0.0) nodes.push_back(node);
  }
  if (nodes.empty()) {
    throw EmptySelection("no nonzero flows for product " + to_string(product) + " in year " +
                         std::to_string(year));
  }

  const auto n = static_cast<Eigen::Index>(nodes.size());
  Matrix flux = Matrix::Zero(n, n);
  auto index_of = [&nodes](const CountryId& id) {
    return static_cast<Eigen::Index>(std::lower_bound(nodes.begin(), nodes.end(), id) -
                                     nodes.begin());
  };
  for (const auto& [key, value] : pairs) {
    if (value > 0.0 && keep.count(key.first) && keep.count(key.second)) {
      flux(index_of(key.first), index_of(key.second)) = value;
    }
  }
  return NetworkBuild{FlowNetwork(std::move(nodes), std::move(flux), product, year), stats};
}

}  // namespace flowallo
