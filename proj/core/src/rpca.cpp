#include "lrq/rpca.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <utility>

namespace lrq {

namespace {

double shrink_scalar(double x, double tau) {
  const double m = std::abs(x) - tau;
  if (m <= 0.0) return 0.0;  // exact zero, also for x == 0
  return x < 0.0 ? -m : m;
}

bool is_zero_matrix(const Matrix& m) { return (m.array() == 0.0).all(); }

}  // namespace

Matrix shrink(const Matrix& x, double tau) {
  if (tau < 0.0) throw std::invalid_argument("shrink: tau must be nonnegative");
  return x.unaryExpr([tau](double v) { return shrink_scalar(v, tau); });
}

SvtResult svt(const Matrix& x, double tau) {
  if (tau < 0.0) throw std::invalid_argument("svt: tau must be nonnegative");
  if (!all_finite(x)) throw std::invalid_argument("svt: input must be finite");

  Eigen::BDCSVD<Matrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericalError("svt: SVD did not converge");

  const Vector& sv = svd.singularValues();
  Index r = 0;
  while (r < sv.size() && sv(r) > tau) ++r;

  SvtResult out;
  out.factors.u = svd.matrixU().leftCols(r);
  out.factors.sigma = (sv.head(r).array() - tau).matrix();
  out.factors.v = svd.matrixV().leftCols(r);
  out.value = out.factors.u * out.factors.sigma.asDiagonal() * out.factors.v.transpose();
  if (r == 0) out.value = Matrix::Zero(x.rows(), x.cols());
  return out;
}

Index numerical_rank(const Vector& sigma, double rank_tol) {
  if (rank_tol <= 0.0) throw std::invalid_argument("numerical_rank: rank_tol must be positive");
  if (sigma.size() == 0) return 0;
  const double cutoff = rank_tol * sigma(0);
  Index r = 0;
  while (r < sigma.size() && sigma(r) > cutoff) ++r;
  return r;
}

double default_lambda(Index m, Index n) {
  if (m < 1 || n < 1) throw std::invalid_argument("default_lambda: dimensions must be positive");
  return 1.0 / std::sqrt(static_cast<double>(std::max(m, n)));
}

double default_alm_mu(const Matrix& m) {
  const double l1 = entrywise_l1(m);
  if (l1 == 0.0) throw std::invalid_argument("default_alm_mu: zero matrix");
  return static_cast<double>(m.rows()) * static_cast<double>(m.cols()) / (4.0 * l1);
}

PcpResult pcp_alm(const Matrix& m, const PcpConfig& config) {
  if (m.rows() < 1 || m.cols() < 1)
    throw std::invalid_argument("pcp_alm: matrix must be nonempty");
  if (!all_finite(m)) throw std::invalid_argument("pcp_alm: input must be finite");
  if (!(config.lambda > 0.0)) throw std::invalid_argument("pcp_alm: lambda must be positive");
  if (!(config.delta > 0.0)) throw std::invalid_argument("pcp_alm: delta must be positive");
  if (config.max_iters < 1) throw std::invalid_argument("pcp_alm: max_iters must be positive");
  if (config.alm_mu && !(*config.alm_mu > 0.0))
    throw std::invalid_argument("pcp_alm: alm_mu must be positive");
  if (!(config.rank_tol > 0.0))
    throw std::invalid_argument("pcp_alm: rank_tol must be positive");

  const Index rows = m.rows();
  const Index cols = m.cols();

  PcpResult res;
  if (is_zero_matrix(m)) {
    // nothing to split, and the default mu would divide by |M|_1 = 0
    res.l = Matrix::Zero(rows, cols);
    res.s = SparseCoo(rows, cols);
    res.l_factors = {Matrix(rows, 0), Vector(0), Matrix(cols, 0)};
    res.iterations = 1;
    res.converged = true;
    return res;
  }

  const double mu = config.alm_mu ? *config.alm_mu : default_alm_mu(m);
  const double m_fro = m.norm();

  Matrix s = Matrix::Zero(rows, cols);
  Matrix y = Matrix::Zero(rows, cols);
  Matrix l;
  SvdFactors l_factors;
  Matrix work;

  int iter = 0;
  bool converged = false;
  double rel = 0.0;
  while (iter < config.max_iters) {
    ++iter;
    work = m - s + y / mu;
    SvtResult lt = svt(work, 1.0 / mu);
    l = std::move(lt.value);
    l_factors = std::move(lt.factors);

    work = m - l + y / mu;
    s = shrink(work, config.lambda / mu);

    work = m - l - s;
    y += mu * work;
    rel = work.norm() / m_fro;
    if (rel <= config.delta) {
      converged = true;
      break;
    }
  }

  res.l = std::move(l);
  res.s = SparseCoo::from_dense(s);
  res.l_factors = std::move(l_factors);
  res.iterations = iter;
  res.converged = converged;
  res.final_residual = rel;
  res.alm_mu_used = mu;
  res.numerical_rank = numerical_rank(res.l_factors.sigma, config.rank_tol);
  res.nnz_fraction =
      static_cast<double>(res.s.nnz()) / (static_cast<double>(rows) * static_cast<double>(cols));
  return res;
}

Matrix classical_pca(const Matrix& m, Index k) {
  if (!all_finite(m)) throw std::invalid_argument("classical_pca: input must be finite");
  if (k < 1 || k > std::min(m.rows(), m.cols()))
    throw std::invalid_argument("classical_pca: k must be in [1, min(m, n)]");
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericalError("classical_pca: SVD did not converge");
  return svd.matrixU().leftCols(k) * svd.singularValues().head(k).asDiagonal() *
         svd.matrixV().leftCols(k).transpose();
}

CoherenceStats coherence(const SvdFactors& factors, Index m, Index n) {
  const Index r = factors.rank();
  if (r < 1) throw std::invalid_argument("coherence: factors must have positive rank");
  if (factors.u.rows() != m || factors.v.rows() != n)
    throw std::invalid_argument("coherence: factor dimensions disagree with m, n");

  CoherenceStats st;
  st.mu_u = factors.u.rowwise().squaredNorm().maxCoeff() * static_cast<double>(m) /
            static_cast<double>(r);
  st.mu_v = factors.v.rowwise().squaredNorm().maxCoeff() * static_cast<double>(n) /
            static_cast<double>(r);
  const double uv_inf = (factors.u * factors.v.transpose()).cwiseAbs().maxCoeff();
  st.mu_uv = uv_inf * uv_inf * static_cast<double>(m) * static_cast<double>(n) /
             static_cast<double>(r);
  return st;
}

RecoveryInstance synth_recovery_instance(Index m, Index n, Index rank, double sparsity,
                                         double magnitude, std::uint64_t seed) {
  if (m < 1 || n < 1)
    throw std::invalid_argument("synth_recovery_instance: dimensions must be positive");
  if (rank < 0 || rank > std::min(m, n))
    throw std::invalid_argument("synth_recovery_instance: rank must be in [0, min(m, n)]");
  if (!(sparsity >= 0.0) || sparsity >= 1.0)
    throw std::invalid_argument("synth_recovery_instance: sparsity must be in [0, 1)");
  if (!(magnitude > 0.0))
    throw std::invalid_argument("synth_recovery_instance: magnitude must be positive");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const double scale = rank > 0 ? 1.0 / std::sqrt(static_cast<double>(rank)) : 0.0;
  Matrix a(m, rank), b(n, rank);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < rank; ++j) a(i, j) = scale * gauss(rng);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < rank; ++j) b(i, j) = scale * gauss(rng);

  RecoveryInstance inst;
  inst.l0 = a * b.transpose();
  if (rank == 0) inst.l0 = Matrix::Zero(m, n);

  const Index total = m * n;
  const Index nnz = static_cast<Index>(std::floor(sparsity * static_cast<double>(total)));

  // partial Fisher-Yates gives a uniform support without replacement
  std::vector<Index> cells(total);
  std::iota(cells.begin(), cells.end(), Index{0});
  for (Index k = 0; k < nnz; ++k) {
    std::uniform_int_distribution<Index> pick(k, total - 1);
    std::swap(cells[k], cells[pick(rng)]);
  }
  std::sort(cells.begin(), cells.begin() + nnz);

  std::uniform_int_distribution<int> coin(0, 1);
  std::vector<SparseEntry> entries;
  entries.reserve(nnz);
  for (Index k = 0; k < nnz; ++k)
    entries.push_back({cells[k] / n, cells[k] % n, coin(rng) ? magnitude : -magnitude});
  inst.s0 = SparseCoo::from_entries(m, n, std::move(entries));

  inst.m = inst.l0;
  for (const SparseEntry& e : inst.s0.entries()) inst.m(e.row, e.col) += e.value;
  return inst;
}

}  // namespace lrq
