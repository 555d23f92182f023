#include "flowallo/backbone.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "flowallo/error.hpp"

namespace flowallo {
namespace {

// Inverse empirical CDF at q: the ceil(q k)-th smallest value (at least the first).
double lower_quantile(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  const auto k = static_cast<double>(values.size());
  auto rank = static_cast<std::size_t>(std::ceil(q * k));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  return values[rank - 1];
}

}  // namespace

Backbone extract_backbone(const FlowNetwork& net, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidValue("alpha must lie in (0, 1]");
  const auto n = static_cast<Eigen::Index>(net.size());
  const Matrix& f = net.flux();
  const Vector out = net.outflow();
  const Vector in = net.inflow();
  const double q = 1.0 - alpha;

  // Thresholds on fractions. Normalisation by a node's own strength is
  // monotone, so comparing fractions of one endpoint is order-preserving.
  Vector out_threshold = Vector::Constant(n, std::numeric_limits<double>::infinity());
  Vector in_threshold = Vector::Constant(n, std::numeric_limits<double>::infinity());
  for (Eigen::Index v = 0; v < n; ++v) {
    std::vector<double> outs;
    std::vector<double> ins;
    for (Eigen::Index u = 0; u < n; ++u) {
      if (f(v, u) > 0.0) outs.push_back(f(v, u) / out(v));
      if (f(u, v) > 0.0) ins.push_back(f(u, v) / in(v));
    }
    if (!outs.empty()) out_threshold(v) = lower_quantile(std::move(outs), q);
    if (!ins.empty()) in_threshold(v) = lower_quantile(std::move(ins), q);
  }

  Backbone bb;
  bb.alpha = alpha;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!(f(i, j) > 0.0)) continue;
      const bool via_source = f(i, j) / out(i) >= out_threshold(i);
      const bool via_target = f(i, j) / in(j) >= in_threshold(j);
      if (via_source || via_target) {
        bb.kept.emplace(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      }
    }
  }
  bb.roles.reserve(net.size());
  bb.node_volume.reserve(net.size());
  for (Eigen::Index v = 0; v < n; ++v) {
    bb.roles.push_back(out(v) > in(v) ? NodeRole::Exporter : NodeRole::Importer);
    bb.node_volume.push_back(out(v) + in(v));
  }
  return bb;
}

}  // namespace flowallo
