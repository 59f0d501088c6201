#pragma once

#include "lrq/mdp.hpp"
#include "lrq/rpca.hpp"

#include <limits>
#include <vector>

namespace lrq {

struct ViConfig {
  double gamma = 1.0;    // discount, in (0, 1]
  double epsilon = 1e-6; // sup-norm stopping tolerance
  int max_sweeps = 10000;
};

struct ViResult {
  Matrix q;  // n_states x n_actions
  int sweeps = 0;
  double residual = 0.0;  // sup-norm change of the last sweep
};

/// One synchronous Bellman sweep: returns the matrix with entries
/// R(s, a) + gamma * sum_s' T(s, a, s') max_a' q(s', a').
Matrix bellman_sweep(const TabularMdp& mdp, const Matrix& q, double gamma);

/// Sweeps from Q = 0 until the sup-norm change drops to epsilon or the sweep
/// budget runs out. Non-convergence is reported through the residual, not an
/// error.
ViResult value_iteration(const TabularMdp& mdp, const ViConfig& config);

/// Row-wise argmax; ties break to the lowest action index.
std::vector<int> extract_policy(const Matrix& q);

/// Deployable value model: truncated SVD factors of the low rank part plus
/// the sparse corrections.
struct CompressedQ {
  SvdFactors factors;
  SparseCoo s;
  double lambda_used = std::numeric_limits<double>::quiet_NaN();
  double delta_used = std::numeric_limits<double>::quiet_NaN();

  Index rows() const { return factors.u.rows(); }
  Index cols() const { return factors.v.rows(); }

  /// Scalars held: r * (m + n + 1) for the factors plus one per sparse entry.
  std::int64_t storage_entries() const;
};

struct QCompression {
  CompressedQ model;
  PcpResult pcp;  // diagnostics of the underlying decomposition
};

/// Runs principal component pursuit on q and packages the result, with the
/// factors cut at the numerical rank. q must be nonzero.
QCompression compress(const Matrix& q, const PcpConfig& config);

/// Row s of u sigma v^T + S without materializing the dense matrix.
Eigen::RowVectorXd lookup_row(const CompressedQ& cq, Index s);

/// Greedy action at a continuous state: argmax over actions of the
/// interpolation-weighted combination of the enclosing corners' rows.
int continuous_policy(const Matrix& q, const Grid2D& grid, ContinuousState s);
int continuous_policy(const CompressedQ& cq, const Grid2D& grid, ContinuousState s);

std::vector<int> extract_policy(const CompressedQ& cq);

/// Fraction of states on which the two policies pick the same action index.
double policy_agreement(const std::vector<int>& a, const std::vector<int>& b);

/// Fraction of states where policy b's action attains the same value in q as
/// policy a's action, so exact ties in a row count as agreement.
double policy_value_agreement(const Matrix& q, const std::vector<int>& a,
                              const std::vector<int>& b);

}  // namespace lrq
