#include "flowallo/flowcalc.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "flowallo/error.hpp"

namespace flowallo {
namespace {

std::string label(const FlowNetwork& net) {
  return "product " + to_string(net.product()) + ", year " + std::to_string(net.year());
}

void check_damping(const FlowOptions& options) {
  if (!(options.damping >= 0.0 && options.damping < 1.0)) {
    throw InvalidValue("damping must lie in [0, 1)");
  }
}

}  // namespace

Vector throughflow(const FlowNetwork& net) {
  return net.inflow().cwiseMax(net.outflow());
}

Vector sources(const FlowNetwork& net, const Vector& throughflow) {
  // T >= inflow holds exactly in floating point since T is one of the two sums.
  return (throughflow - net.inflow()).cwiseMax(0.0);
}

Matrix coefficients(const FlowNetwork& net, const Vector& throughflow) {
  return (net.flux().array().colwise() / throughflow.array()).matrix();
}

Fundamental fundamental(const Matrix& coefficients, const FlowOptions& options) {
  check_damping(options);
  const auto n = coefficients.rows();
  const Matrix system = Matrix::Identity(n, n) - (1.0 - options.damping) * coefficients;
  Eigen::PartialPivLU<Matrix> lu(system);

  const Matrix& packed = lu.matrixLU();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(std::abs(packed(i, i)) > 0.0)) throw SingularNetwork("zero pivot in I - M");
  }
  const double rcond = lu.rcond();
  if (!(rcond >= options.min_rcond)) {
    throw SingularNetwork("condition estimate of I - M exceeds " +
                          std::to_string(1.0 / options.min_rcond));
  }
  Matrix inverse = lu.inverse();
  if (!inverse.allFinite()) throw SingularNetwork("non-finite fundamental matrix");
  return Fundamental{std::move(inverse), rcond};
}

Vector impacts_closed_form(const Vector& sources, const Matrix& fundamental) {
  const auto n = fundamental.rows();
  // Both sums accumulate in extended precision; u_ii >= 1 keeps the quotient tame.
  Vector impacts(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    long double upstream = 0.0L;    // sum_j S_j u_ji
    long double downstream = 0.0L;  // sum_k u_ik
    for (Eigen::Index j = 0; j < n; ++j) {
      upstream += static_cast<long double>(sources(j)) * fundamental(j, i);
      downstream += fundamental(i, j);
    }
    impacts(i) = static_cast<double>(upstream * downstream / fundamental(i, i));
  }
  return impacts;
}

double impact_by_extraction(const FlowNetwork& net, std::size_t i, const FlowOptions& options) {
  check_damping(options);
  const auto n = static_cast<Eigen::Index>(net.size());
  const auto idx = static_cast<Eigen::Index>(i);
  if (idx >= n) throw InvalidValue("node index out of range");

  const Vector full_t = throughflow(net);
  const Vector full_s = sources(net, full_t);
  Matrix edited_m = (1.0 - options.damping) * coefficients(net, full_t);
  Vector edited_s = full_s;
  edited_m.col(idx).setZero();
  edited_s(idx) = 0.0;

  // (I - M'^T) T' = S'
  const Matrix system = Matrix::Identity(n, n) - edited_m.transpose();
  Eigen::FullPivHouseholderQR<Matrix> qr(system);
  qr.setThreshold(options.min_rcond);
  if (!qr.isInvertible()) throw SingularNetwork("extraction system is singular (" + label(net) + ")");
  const Vector edited_t = qr.solve(edited_s);
  if (!edited_t.allFinite()) throw SingularNetwork("non-finite extraction solve (" + label(net) + ")");

  // Reference T from the unedited system keeps the damped variant consistent.
  Vector reference_t = full_t;
  if (options.damping > 0.0) {
    const Matrix base = Matrix::Identity(n, n) - (1.0 - options.damping) *
                                                     coefficients(net, full_t).transpose();
    Eigen::FullPivHouseholderQR<Matrix> base_qr(base);
    reference_t = base_qr.solve(full_s);
  }
  return (reference_t - edited_t).sum();
}

FlowAnalysis analyze(const FlowNetwork& net, const FlowOptions& options) {
  FlowAnalysis a;
  a.throughflow = throughflow(net);
  a.sources = sources(net, a.throughflow);
  a.coefficients = coefficients(net, a.throughflow);
  auto u = fundamental(a.coefficients, options);
  a.fundamental = std::move(u.matrix);
  a.rcond = u.rcond;
  a.impacts = impacts_closed_form(a.sources, a.fundamental);
  return a;
}

double throughflow_residual(const FlowAnalysis& analysis) {
  const Vector& t = analysis.throughflow;
  const Vector rebuilt = analysis.sources + analysis.coefficients.transpose() * t;
  const double scale = t.cwiseAbs().maxCoeff();
  return scale > 0.0 ? (t - rebuilt).cwiseAbs().maxCoeff() / scale : 0.0;
}

}  // namespace flowallo
