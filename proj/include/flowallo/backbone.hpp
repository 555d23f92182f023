#pragma once

#include <cstddef>
#include <set>
#include <utility>
#include <vector>

#include "flowallo/netcore.hpp"

namespace flowallo {

enum class NodeRole { Importer, Exporter };

/// Sparse subset of a flow network kept for drawing. Visualization only:
/// nothing downstream (eta, GINI, impacts) reads it.
struct Backbone {
  std::set<std::pair<std::size_t, std::size_t>> kept;  // (from, to) node indices
  double alpha = 0.05;
  std::vector<NodeRole> roles;       // exporter iff out-strength > in-strength
  std::vector<double> node_volume;   // in-strength + out-strength
};

/// Local-quantile filter. For every node the weights of its outgoing edges are
/// normalised to fractions of its out-strength (likewise for incoming edges).
/// An edge survives when, at either endpoint and in the matching direction,
/// its fraction is at least the empirical (1 - alpha) quantile of that
/// endpoint's fractions. The quantile is the inverse empirical CDF (the
/// ceil(q k)-th smallest of k values), so ties with it are kept and every
/// node's heaviest edge always survives.
Backbone extract_backbone(const FlowNetwork& net, double alpha);

}  // namespace flowallo
