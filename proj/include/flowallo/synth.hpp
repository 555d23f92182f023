#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "flowallo/allometry.hpp"
#include "flowallo/netcore.hpp"

namespace flowallo {

/// SplitMix64. Integer arithmetic only, so streams are identical on every
/// platform; split() derives an independent child stream.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound); bound > 0. Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t bound) noexcept {
    const std::uint64_t limit = -bound % bound;
    std::uint64_t x = next();
    while (x < limit) x = next();
    return x % bound;
  }

  SplitMix64 split() noexcept { return SplitMix64(next() ^ 0x6A09E667F3BCC909ULL); }

private:
  std::uint64_t state_;
};

enum class SynthKind { Star, Chain, RandomTree, RandomFlow };

SynthKind parse_synth_kind(std::string_view text);
std::string_view to_string(SynthKind kind);

struct SynthSpec {
  SynthKind kind = SynthKind::Star;
  std::size_t n = 2;
  double weight = 1.0;        // uniform edge weight for star, chain, random_tree
  double weight_min = 0.0;    // random_flow weights are uniform on (weight_min, weight_max]
  double weight_max = 100.0;
  double density = 0.5;       // random_flow: probability of each forward edge i -> j, i < j
  double back_edge_ratio = 0.0;  // random_flow: back edge j -> i probability = density * ratio
  std::uint64_t seed = 0;
  int year = 2000;
  ProductCode product = ProductCode::parse("0");
};

/// Node labels N001, N002, ... padded so lexicographic order is numeric order.
std::vector<CountryId> synth_node_names(std::size_t n);

/// Star: node 0 sends `weight` to each other node. Chain: i -> i+1 with
/// `weight`. RandomTree: uniform random recursive tree, each node k > 0 hangs
/// from a uniformly chosen earlier node. RandomFlow: forward edges with
/// probability `density` and optional back edges; a node left isolated is
/// linked by one forward edge to a random partner so every node is retained.
FlowNetwork generate_network(const SynthSpec& spec);

/// Tree kinds only (star, chain, random_tree); throws BadSpec otherwise.
RootedTree generate_tree(const SynthSpec& spec);

/// Row-major list of nonzero flows as canonical trade records.
std::vector<TradeRecord> to_records(const FlowNetwork& net, const ProductCode& product);

}  // namespace flowallo
