#include "flowallo/allometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "flowallo/error.hpp"

namespace flowallo {

std::string_view to_string(Hierarchy h) {
  switch (h) {
    case Hierarchy::Hierarchical: return "hierarchical";
    case Hierarchy::Neutral: return "neutral";
    case Hierarchy::Flat: return "flat";
  }
  return "neutral";
}

AllometryFit fit(std::span<const double> throughflow, std::span<const double> impacts) {
  if (throughflow.size() != impacts.size()) {
    throw InvalidValue("throughflow and impact vectors differ in length");
  }
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t i = 0; i < throughflow.size(); ++i) {
    const double t = throughflow[i];
    const double c = impacts[i];
    if (t > 0.0 && c > 0.0 && std::isfinite(t) && std::isfinite(c)) {
      x.push_back(std::log10(t));
      y.push_back(std::log10(c));
    }
  }
  const std::size_t n = x.size();
  if (n < 3) throw TooFewPoints(std::to_string(n) + " positive (T, C) pairs, need 3");
  if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); })) {
    throw DegenerateFit("all throughflows are equal");
  }

  const double dn = static_cast<double>(n);
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= dn;
  my /= dn;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw DegenerateFit("zero variance in log throughflow");

  AllometryFit out;
  out.n = n;
  out.eta = sxy / sxx;
  out.intercept = my - out.eta * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (out.intercept + out.eta * x[i]);
    sse += r * r;
  }
  out.stderr_eta = std::sqrt(sse / (dn - 2.0) / sxx);
  out.r2 = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;
  out.classification = classify(out.eta, out.stderr_eta);
  return out;
}

Hierarchy classify(double eta, double stderr_eta) {
  const double band = 2.0 * stderr_eta;
  if (eta - band > 1.0) return Hierarchy::Hierarchical;
  if (eta + band < 1.0) return Hierarchy::Flat;
  return Hierarchy::Neutral;
}

TreeAllometry tree_allometry(const RootedTree& tree) {
  const std::size_t n = tree.n;
  if (n == 0) throw NotATree("empty tree");
  if (tree.edges.size() != n - 1) {
    throw NotATree(std::to_string(tree.edges.size()) + " edges for " + std::to_string(n) + " nodes");
  }

  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> parent(n, kNone);
  std::vector<std::vector<std::size_t>> children(n);
  for (const auto& [from, to] : tree.edges) {
    if (from >= n || to >= n) throw NotATree("edge endpoint out of range");
    if (from == to) throw NotATree("self-loop on node " + std::to_string(from));
    if (parent[to] != kNone) throw NotATree("node " + std::to_string(to) + " has two parents");
    parent[to] = from;
    children[from].push_back(to);
  }
  std::size_t root = kNone;
  for (std::size_t v = 0; v < n; ++v) {
    if (parent[v] != kNone) continue;
    if (root != kNone) throw NotATree("multiple roots");
    root = v;
  }
  if (root == kNone) throw NotATree("no root (cycle)");

  // Iterative DFS preorder; reversed it visits children before parents.
  std::vector<std::size_t> order;
  order.reserve(n);
  std::vector<std::size_t> stack{root};
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    order.push_back(v);
    for (std::size_t c : children[v]) stack.push_back(c);
  }
  if (order.size() != n) throw NotATree("nodes unreachable from the root (cycle)");

  TreeAllometry out;
  out.root = root;
  out.throughflow.assign(n, 1.0);
  out.impacts.assign(n, 0.0);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const std::size_t v = *it;
    out.impacts[v] += out.throughflow[v];
    if (parent[v] != kNone) {
      out.throughflow[parent[v]] += out.throughflow[v];
      out.impacts[parent[v]] += out.impacts[v];
    }
  }
  return out;
}

}  // namespace flowallo
