#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "flowallo/netcore.hpp"

namespace flowallo {

enum class Hierarchy { Hierarchical, Neutral, Flat };

std::string_view to_string(Hierarchy h);

/// Log-log least-squares fit of impact against throughflow.
struct AllometryFit {
  double eta = 0.0;        // slope
  double stderr_eta = 0.0; // residual-based standard error of the slope, n - 2 dof
  double intercept = 0.0;  // log10 C at log10 T = 0
  double r2 = 0.0;
  std::size_t n = 0;       // points used
  Hierarchy classification = Hierarchy::Neutral;
};

/// OLS of log10 C on log10 T with intercept, over the pairs where both are
/// strictly positive. Throws TooFewPoints below three usable pairs and
/// DegenerateFit when every usable T is equal.
AllometryFit fit(std::span<const double> throughflow, std::span<const double> impacts);

inline AllometryFit fit(const Vector& throughflow, const Vector& impacts) {
  return fit(std::span<const double>(throughflow.data(), static_cast<std::size_t>(throughflow.size())),
             std::span<const double>(impacts.data(), static_cast<std::size_t>(impacts.size())));
}

/// Neutral when eta is within two standard errors of 1, otherwise hierarchical
/// (above) or flat (below).
Hierarchy classify(double eta, double stderr_eta);

/// Rooted directed tree given as parent -> child edges over nodes 0..n-1.
struct RootedTree {
  std::size_t n = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
};

struct TreeAllometry {
  std::vector<double> throughflow;  // subtree node count, including the node
  std::vector<double> impacts;      // sum of subtree counts over the subtree
  std::size_t root = 0;
};

/// Classical tree allometry in one post-order pass. Throws NotATree for
/// cycles, several roots, a node with two parents, or unreachable nodes.
TreeAllometry tree_allometry(const RootedTree& tree);

}  // namespace flowallo
