#pragma once

#include "lrq/matrix.hpp"

#include <cstdint>
#include <optional>

namespace lrq {

/// Economy SVD factors: u * sigma.asDiagonal() * v.transpose() with
/// orthonormal columns and nonincreasing nonnegative singular values.
struct SvdFactors {
  Matrix u;      // m x r
  Vector sigma;  // r
  Matrix v;      // n x r

  Index rank() const { return sigma.size(); }
};

struct PcpConfig {
  double lambda = 0.0;           // sparsity weight, must be positive (see default_lambda)
  double delta = 1e-5;           // relative Frobenius stopping tolerance
  int max_iters = 1000;
  std::optional<double> alm_mu;  // penalty parameter; empty derives m*n / (4 |M|_1)
  double rank_tol = 1e-9;        // numerical rank threshold, relative to sigma_1
};

struct PcpResult {
  Matrix l;
  SparseCoo s;
  SvdFactors l_factors;  // SVD of l, carried out of the final thresholding step
  int iterations = 0;
  bool converged = false;
  double final_residual = 0.0;  // |M - L - S|_F / |M|_F
  double alm_mu_used = 0.0;
  Index numerical_rank = 0;
  double nnz_fraction = 0.0;  // nnz(S) / (m*n)
};

/// Elementwise soft threshold sign(x) * max(|x| - tau, 0). Entries at or
/// below tau in magnitude come out as exact zeros, and sign(0) = 0.
Matrix shrink(const Matrix& x, double tau);

struct SvtResult {
  Matrix value;
  SvdFactors factors;  // truncated to the singular values strictly above tau

  Index rank() const { return factors.rank(); }
};

/// Singular value thresholding: soft-thresholds the singular values of x.
/// Throws NumericalError if the underlying SVD fails.
SvtResult svt(const Matrix& x, double tau);

/// Count of singular values above rank_tol * sigma(0). sigma must be
/// nonincreasing.
Index numerical_rank(const Vector& sigma, double rank_tol);

/// 1 / sqrt(max(m, n)); the sparsity weight that needs no tuning.
double default_lambda(Index m, Index n);

/// m*n / (4 |M|_1). Throws std::invalid_argument for a zero matrix.
double default_alm_mu(const Matrix& m);

/// Principal component pursuit: split m into a low rank l plus sparse s by
/// minimizing |L|_* + lambda |S|_1 subject to L + S = M, via an augmented
/// Lagrangian of alternating shrink and svt steps.
PcpResult pcp_alm(const Matrix& m, const PcpConfig& config);

/// Best rank-k approximation (truncated SVD). k must lie in [1, min(m, n)].
Matrix classical_pca(const Matrix& m, Index k);

struct CoherenceStats {
  double mu_u = 0.0;
  double mu_v = 0.0;
  double mu_uv = 0.0;
};

/// Smallest incoherence parameters satisfied by the given factors:
/// mu_u = (m/r) max_i |U^T e_i|^2, mu_v likewise, and
/// mu_uv = (m*n/r) |U V^T|_inf^2.
CoherenceStats coherence(const SvdFactors& factors, Index m, Index n);

struct RecoveryInstance {
  Matrix m;   // l0 plus the sparse corruption
  Matrix l0;  // ground-truth low rank part
  SparseCoo s0;
};

/// Seeded low-rank plus sparse test instance. l0 = A B^T with A, B iid
/// standard Gaussian scaled by 1/sqrt(rank); the support of s0 holds
/// floor(sparsity * m * n) cells drawn uniformly without replacement, each
/// set to +/- magnitude with equal probability. Deterministic per seed.
RecoveryInstance synth_recovery_instance(Index m, Index n, Index rank, double sparsity,
                                         double magnitude, std::uint64_t seed);

}  // namespace lrq
