#include "lrq/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace lrq {

namespace {

void check_q_dims(const TabularMdp& mdp, const Matrix& q) {
  if (q.rows() != mdp.n_states() || q.cols() != mdp.n_actions())
    throw std::invalid_argument("q has dimensions " + std::to_string(q.rows()) + "x" +
                                std::to_string(q.cols()) + " but the model has " +
                                std::to_string(mdp.n_states()) + " states and " +
                                std::to_string(mdp.n_actions()) + " actions");
}

void check_vi_config(const ViConfig& cfg) {
  if (!(cfg.gamma > 0.0 && cfg.gamma <= 1.0))
    throw std::invalid_argument("value_iteration: gamma must be in (0, 1]");
  if (!(cfg.epsilon > 0.0))
    throw std::invalid_argument("value_iteration: epsilon must be positive");
  if (cfg.max_sweeps < 1)
    throw std::invalid_argument("value_iteration: max_sweeps must be positive");
}

// one synchronous sweep into out, returning the sup-norm change against q
double sweep_into(const TabularMdp& mdp, double gamma, const Matrix& q, const Vector& v,
                  Matrix& out) {
  const int n_states = mdp.n_states();
  const int n_actions = mdp.n_actions();
  double resid = 0.0;
  for (int a = 0; a < n_actions; ++a) {
    for (int s = 0; s < n_states; ++s) {
      const auto succ = mdp.successors(s, a);
      const auto prob = mdp.probabilities(s, a);
      double exp_v = 0.0;
      for (std::size_t k = 0; k < succ.size(); ++k) exp_v += prob[k] * v[succ[k]];
      const double value = mdp.rewards(s, a) + gamma * exp_v;
      resid = std::max(resid, std::abs(value - q(s, a)));
      out(s, a) = value;
    }
  }
  return resid;
}

int argmax_lowest(const Eigen::RowVectorXd& row) {
  int best = 0;
  for (int j = 1; j < row.size(); ++j)
    if (row(j) > row(best)) best = j;
  return best;
}

}  // namespace

Matrix bellman_sweep(const TabularMdp& mdp, const Matrix& q, double gamma) {
  check_q_dims(mdp, q);
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw std::invalid_argument("bellman_sweep: gamma must be in (0, 1]");
  const Vector v = q.rowwise().maxCoeff();
  Matrix out(q.rows(), q.cols());
  sweep_into(mdp, gamma, q, v, out);
  return out;
}

ViResult value_iteration(const TabularMdp& mdp, const ViConfig& config) {
  check_vi_config(config);
  Matrix q = Matrix::Zero(mdp.n_states(), mdp.n_actions());
  Matrix next(mdp.n_states(), mdp.n_actions());
  Vector v(mdp.n_states());

  int sweeps = 0;
  double resid = 0.0;
  while (sweeps < config.max_sweeps) {
    ++sweeps;
    v = q.rowwise().maxCoeff();
    resid = sweep_into(mdp, config.gamma, q, v, next);
    q.swap(next);
    if (resid <= config.epsilon) break;
  }
  return {std::move(q), sweeps, resid};
}

std::vector<int> extract_policy(const Matrix& q) {
  std::vector<int> policy(static_cast<std::size_t>(q.rows()));
  for (Index s = 0; s < q.rows(); ++s) {
    Index best = 0;
    for (Index j = 1; j < q.cols(); ++j)
      if (q(s, j) > q(s, best)) best = j;
    policy[static_cast<std::size_t>(s)] = static_cast<int>(best);
  }
  return policy;
}

std::int64_t CompressedQ::storage_entries() const {
  const std::int64_t r = factors.rank();
  return r * (rows() + cols() + 1) + s.nnz();
}

QCompression compress(const Matrix& q, const PcpConfig& config) {
  if (q.rows() < 1 || q.cols() < 1 || (q.array() == 0.0).all())
    throw std::invalid_argument("compress: q must be a nonzero matrix");

  PcpResult pcp = pcp_alm(q, config);
  const Index r = pcp.numerical_rank;

  QCompression out;
  out.model.factors.u = pcp.l_factors.u.leftCols(r);
  out.model.factors.sigma = pcp.l_factors.sigma.head(r);
  out.model.factors.v = pcp.l_factors.v.leftCols(r);
  out.model.s = pcp.s;
  out.model.lambda_used = config.lambda;
  out.model.delta_used = config.delta;
  out.pcp = std::move(pcp);
  return out;
}

Eigen::RowVectorXd lookup_row(const CompressedQ& cq, Index s) {
  if (s < 0 || s >= cq.rows())
    throw std::out_of_range("lookup_row: state " + std::to_string(s) + " out of range");
  Eigen::RowVectorXd row;
  if (cq.factors.rank() == 0) {
    row = Eigen::RowVectorXd::Zero(cq.cols());
  } else {
    row = cq.factors.u.row(s).cwiseProduct(cq.factors.sigma.transpose()) *
          cq.factors.v.transpose();
  }
  for (const SparseEntry& e : cq.s.row_span(s)) row(e.col) += e.value;
  return row;
}

int continuous_policy(const Matrix& q, const Grid2D& grid, ContinuousState s) {
  if (q.rows() != grid.n_states() || q.cols() != grid.n_actions())
    throw std::invalid_argument("continuous_policy: q does not match the grid");
  const CellWeights w = interpolate(grid, s);
  Eigen::RowVectorXd row = w.weight[0] * q.row(w.state[0]);
  for (int k = 1; k < w.count; ++k) row += w.weight[k] * q.row(w.state[k]);
  return argmax_lowest(row);
}

int continuous_policy(const CompressedQ& cq, const Grid2D& grid, ContinuousState s) {
  if (cq.rows() != grid.n_states() || cq.cols() != grid.n_actions())
    throw std::invalid_argument("continuous_policy: model does not match the grid");
  const CellWeights w = interpolate(grid, s);

  Eigen::RowVectorXd row;
  if (cq.factors.rank() == 0) {
    row = Eigen::RowVectorXd::Zero(cq.cols());
  } else {
    // combine the corner rows of U first, then one r x n product
    Eigen::RowVectorXd combo = w.weight[0] * cq.factors.u.row(w.state[0]);
    for (int k = 1; k < w.count; ++k) combo += w.weight[k] * cq.factors.u.row(w.state[k]);
    row = combo.cwiseProduct(cq.factors.sigma.transpose()) * cq.factors.v.transpose();
  }
  for (int k = 0; k < w.count; ++k)
    for (const SparseEntry& e : cq.s.row_span(w.state[k])) row(e.col) += w.weight[k] * e.value;
  return argmax_lowest(row);
}

std::vector<int> extract_policy(const CompressedQ& cq) {
  std::vector<int> policy(static_cast<std::size_t>(cq.rows()));
  for (Index s = 0; s < cq.rows(); ++s)
    policy[static_cast<std::size_t>(s)] = argmax_lowest(lookup_row(cq, s));
  return policy;
}

double policy_agreement(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size() || a.empty())
    throw std::invalid_argument("policy_agreement: policies must have equal nonzero length");
  std::size_t same = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] == b[i]) ++same;
  return static_cast<double>(same) / static_cast<double>(a.size());
}

double policy_value_agreement(const Matrix& q, const std::vector<int>& a,
                              const std::vector<int>& b) {
  if (a.size() != b.size() || static_cast<Index>(a.size()) != q.rows())
    throw std::invalid_argument("policy_value_agreement: sizes disagree");
  std::size_t same = 0;
  for (Index s = 0; s < q.rows(); ++s)
    if (q(s, b[static_cast<std::size_t>(s)]) == q(s, a[static_cast<std::size_t>(s)])) ++same;
  return static_cast<double>(same) / static_cast<double>(q.rows());
}

}  // namespace lrq
