#include "flowallo/synth.hpp"

#include <cmath>
#include <string>

#include "flowallo/error.hpp"

namespace flowallo {

SynthKind parse_synth_kind(std::string_view text) {
  if (text == "star") return SynthKind::Star;
  if (text == "chain") return SynthKind::Chain;
  if (text == "random_tree") return SynthKind::RandomTree;
  if (text == "random_flow") return SynthKind::RandomFlow;
  throw BadSpec("unknown kind '" + std::string(text) + "'");
}

std::string_view to_string(SynthKind kind) {
  switch (kind) {
    case SynthKind::Star: return "star";
    case SynthKind::Chain: return "chain";
    case SynthKind::RandomTree: return "random_tree";
    case SynthKind::RandomFlow: return "random_flow";
  }
  return "star";
}

std::vector<CountryId> synth_node_names(std::size_t n) {
  const std::size_t width = std::max<std::size_t>(3, std::to_string(n).size());
  std::vector<CountryId> names;
  names.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) {
    std::string digits = std::to_string(i);
    names.push_back(CountryId::parse("N" + std::string(width - digits.size(), '0') + digits));
  }
  return names;
}

namespace {

void validate(const SynthSpec& spec) {
  if (spec.n < 2) throw BadSpec("n must be at least 2");
  if (spec.kind == SynthKind::RandomFlow) {
    if (!(spec.density > 0.0 && spec.density <= 1.0)) throw BadSpec("density must lie in (0, 1]");
    if (!(spec.weight_min >= 0.0 && spec.weight_max > spec.weight_min) ||
        !std::isfinite(spec.weight_max)) {
      throw BadSpec("weight range must satisfy 0 <= min < max");
    }
    if (!(spec.back_edge_ratio >= 0.0 && spec.back_edge_ratio <= 1.0)) {
      throw BadSpec("back-edge ratio must lie in [0, 1]");
    }
  } else if (!(spec.weight > 0.0) || !std::isfinite(spec.weight)) {
    throw BadSpec("weight must be positive");
  }
}

std::vector<std::size_t> tree_parents(const SynthSpec& spec) {
  std::vector<std::size_t> parent(spec.n, 0);
  SplitMix64 rng(spec.seed);
  for (std::size_t k = 1; k < spec.n; ++k) {
    switch (spec.kind) {
      case SynthKind::Star: parent[k] = 0; break;
      case SynthKind::Chain: parent[k] = k - 1; break;
      case SynthKind::RandomTree: parent[k] = static_cast<std::size_t>(rng.below(k)); break;
      case SynthKind::RandomFlow: throw BadSpec("random_flow is not a tree kind");
    }
  }
  return parent;
}

}  // namespace

RootedTree generate_tree(const SynthSpec& spec) {
  validate(spec);
  if (spec.kind == SynthKind::RandomFlow) throw BadSpec("random_flow is not a tree kind");
  const auto parent = tree_parents(spec);
  RootedTree tree;
  tree.n = spec.n;
  for (std::size_t k = 1; k < spec.n; ++k) tree.edges.emplace_back(parent[k], k);
  return tree;
}

FlowNetwork generate_network(const SynthSpec& spec) {
  validate(spec);
  const auto n = static_cast<Eigen::Index>(spec.n);
  Matrix flux = Matrix::Zero(n, n);

  if (spec.kind != SynthKind::RandomFlow) {
    const auto parent = tree_parents(spec);
    for (std::size_t k = 1; k < spec.n; ++k) {
      flux(static_cast<Eigen::Index>(parent[k]), static_cast<Eigen::Index>(k)) = spec.weight;
    }
  } else {
    SplitMix64 rng(spec.seed);
    SplitMix64 edges = rng.split();
    SplitMix64 weights = rng.split();
    SplitMix64 repair = rng.split();
    const double span = spec.weight_max - spec.weight_min;
    auto draw_weight = [&] { return spec.weight_max - weights.uniform() * span; };
    const double back_p = spec.density * spec.back_edge_ratio;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        if (edges.uniform() < spec.density) flux(i, j) = draw_weight();
        if (back_p > 0.0 && edges.uniform() < back_p) flux(j, i) = draw_weight();
      }
    }
    for (Eigen::Index v = 0; v < n; ++v) {
      if (flux.row(v).sum() > 0.0 || flux.col(v).sum() > 0.0) continue;
      auto other = static_cast<Eigen::Index>(repair.below(spec.n - 1));
      if (other >= v) ++other;
      if (v < other) {
        flux(v, other) = draw_weight();
      } else {
        flux(other, v) = draw_weight();
      }
    }
  }
  return FlowNetwork(synth_node_names(spec.n), std::move(flux), spec.product, spec.year);
}

std::vector<TradeRecord> to_records(const FlowNetwork& net, const ProductCode& product) {
  std::vector<TradeRecord> out;
  const auto n = static_cast<Eigen::Index>(net.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double v = net.flux()(i, j);
      if (v > 0.0) {
        out.push_back(TradeRecord{net.year(), net.nodes()[static_cast<std::size_t>(i)],
                                  net.nodes()[static_cast<std::size_t>(j)], product, v, 0});
      }
    }
  }
  return out;
}

}  // namespace flowallo
