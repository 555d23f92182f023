#pragma once

#include <cstddef>

#include "flowallo/netcore.hpp"

namespace flowallo {

/// Derived quantities of one flow network.
struct FlowAnalysis {
  Vector throughflow;   // T, dollars
  Vector sources;       // S, dollars
  Matrix coefficients;  // M, m_ij = f_ij / T_i
  Matrix fundamental;   // U = (I - M)^-1
  Vector impacts;       // C, dollars
  double rcond = 0.0;   // reciprocal condition estimate of I - M (1-norm)
};

struct FlowOptions {
  /// Opt-in fallback for saturated circulations: M is multiplied by
  /// (1 - damping) before inversion. Zero leaves M untouched.
  double damping = 0.0;
  /// Solves whose reciprocal condition estimate falls below this raise SingularNetwork.
  double min_rcond = 1e-12;
};

/// T_i = max(inflow_i, outflow_i).
Vector throughflow(const FlowNetwork& net);

/// S_i = T_i - inflow_i; never negative.
Vector sources(const FlowNetwork& net, const Vector& throughflow);

/// Row-normalised flux: m_ij = f_ij / T_i.
Matrix coefficients(const FlowNetwork& net, const Vector& throughflow);

struct Fundamental {
  Matrix matrix;
  double rcond = 0.0;
};

/// U = (I - M)^-1 through a partially pivoted LU. Throws SingularNetwork when
/// the factorisation breaks down or the condition estimate exceeds 1/min_rcond.
Fundamental fundamental(const Matrix& coefficients, const FlowOptions& options = {});

/// Closed-form impacts:
///   C_i = sum_k sum_j S_j u_ji u_ik / u_ii
///       = (sum_j S_j u_ji) * (sum_k u_ik) / u_ii,
/// evaluated for every node in O(N^2).
Vector impacts_closed_form(const Vector& sources, const Matrix& fundamental);

/// Impact of node `i` by hypothetical extraction: zero column i of M and S_i,
/// re-solve the flow balance T'_k = S'_k + sum_j m'_jk T'_j from scratch and
/// return sum_k (T_k - T'_k). Uses a full-pivot QR solve, independent of the
/// LU inverse behind the closed form, so it can serve as its oracle.
double impact_by_extraction(const FlowNetwork& net, std::size_t i, const FlowOptions& options = {});

/// Throughflow, sources, coefficients, fundamental matrix and closed-form impacts.
FlowAnalysis analyze(const FlowNetwork& net, const FlowOptions& options = {});

/// max_k |T_k - (S_k + sum_j m_jk T_j)| / max_k |T_k|.
double throughflow_residual(const FlowAnalysis& analysis);

}  // namespace flowallo
