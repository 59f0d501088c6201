#include "lrq/io.hpp"
#include "lrq/mdp.hpp"
#include "lrq/rpca.hpp"
#include "lrq/sim.hpp"
#include "lrq/solver.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace lrq;

namespace {

struct GridOpts {
  std::string problem;
  std::optional<double> d1min, d1max, d2min, d2max, amin, amax;
  std::optional<int> d1count, d2count, acount;
};

void add_grid_options(CLI::App* cmd, GridOpts& o) {
  cmd->add_option("--problem", o.problem, "mountain-car or pendulum")->required();
  cmd->add_option("--dim1-min", o.d1min, "override the dim1 lower bound");
  cmd->add_option("--dim1-max", o.d1max, "override the dim1 upper bound");
  cmd->add_option("--dim1-count", o.d1count, "override the dim1 node count");
  cmd->add_option("--dim2-min", o.d2min, "override the dim2 lower bound");
  cmd->add_option("--dim2-max", o.d2max, "override the dim2 upper bound");
  cmd->add_option("--dim2-count", o.d2count, "override the dim2 node count");
  cmd->add_option("--actions-min", o.amin, "override the lowest action value");
  cmd->add_option("--actions-max", o.amax, "override the highest action value");
  cmd->add_option("--actions-count", o.acount, "override the action count");
}

Grid2D make_grid(const GridOpts& o) {
  Grid2D g = default_grid(problem_from_name(o.problem));
  if (o.d1min) g.dim1.lo = *o.d1min;
  if (o.d1max) g.dim1.hi = *o.d1max;
  if (o.d1count) g.dim1.count = *o.d1count;
  if (o.d2min) g.dim2.lo = *o.d2min;
  if (o.d2max) g.dim2.hi = *o.d2max;
  if (o.d2count) g.dim2.count = *o.d2count;
  if (o.amin) g.actions.lo = *o.amin;
  if (o.amax) g.actions.hi = *o.amax;
  if (o.acount) g.actions.count = *o.acount;
  g.validate();
  return g;
}

struct PcpOpts {
  std::optional<double> lambda;
  double delta = 1e-5;
  int max_iters = 1000;
  std::optional<double> alm_mu;
  double rank_tol = 1e-9;
};

void add_pcp_options(CLI::App* cmd, PcpOpts& o) {
  cmd->add_option("--lambda", o.lambda,
                  "sparsity weight (default 1/sqrt(max(m, n)))");
  cmd->add_option("--delta", o.delta, "relative stopping tolerance")->capture_default_str();
  cmd->add_option("--max-iters", o.max_iters, "iteration budget")->capture_default_str();
  cmd->add_option("--alm-mu", o.alm_mu, "penalty parameter (default m*n / (4 |M|_1))");
  cmd->add_option("--rank-tol", o.rank_tol, "numerical rank threshold")->capture_default_str();
}

PcpConfig make_pcp_config(const PcpOpts& o, Index m, Index n) {
  PcpConfig cfg;
  cfg.lambda = o.lambda ? *o.lambda : default_lambda(m, n);
  cfg.delta = o.delta;
  cfg.max_iters = o.max_iters;
  cfg.alm_mu = o.alm_mu;
  cfg.rank_tol = o.rank_tol;
  return cfg;
}

fs::path resolve_out(const std::string& out_dir, const std::string& path) {
  fs::path p(path);
  if (!out_dir.empty() && p.is_relative()) p = fs::path(out_dir) / p;
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  return p;
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  out << text;
  out.flush();
  if (!out) throw IoError(path.string() + ": write failed");
}

void write_pcp_stats(const fs::path& path, Index rows, Index cols, const PcpConfig& cfg,
                     const PcpResult& r, std::int64_t storage) {
  std::string buf =
      "rows,cols,lambda,delta,alm_mu,max_iters,iterations,converged,final_residual,"
      "numerical_rank,nnz_fraction,storage_entries\n";
  buf += std::to_string(rows) + ',' + std::to_string(cols) + ',';
  buf += format_double(cfg.lambda) + ',' + format_double(cfg.delta) + ',';
  buf += format_double(r.alm_mu_used) + ',' + std::to_string(cfg.max_iters) + ',';
  buf += std::to_string(r.iterations) + ',' + std::string(r.converged ? "1" : "0") + ',';
  buf += format_double(r.final_residual) + ',' + std::to_string(r.numerical_rank) + ',';
  buf += format_double(r.nnz_fraction) + ',' + std::to_string(storage) + '\n';
  write_text_file(path, buf);
}

void check_grid_match(const Grid2D& g, Index rows, Index cols, const std::string& what) {
  if (rows != g.n_states() || cols != g.n_actions())
    throw std::invalid_argument(what + " has shape " + std::to_string(rows) + "x" +
                                std::to_string(cols) + " but the grid expects " +
                                std::to_string(g.n_states()) + "x" +
                                std::to_string(g.n_actions()) +
                                " (check the grid flags)");
}

// ---------------------------------------------------------------------------

struct SolveOpts {
  GridOpts grid;
  std::optional<double> gamma;
  double epsilon = 1e-6;
  int max_sweeps = 10000;
  std::string out;
  std::string out_dir;
};

int run_solve(const SolveOpts& o) {
  const Problem p = problem_from_name(o.grid.problem);
  const Grid2D g = make_grid(o.grid);
  const TabularMdp mdp = build_tabular(p, g);

  ViConfig cfg;
  cfg.gamma = o.gamma ? *o.gamma : (p == Problem::MountainCar ? 1.0 : 0.95);
  cfg.epsilon = o.epsilon;
  cfg.max_sweeps = o.max_sweeps;

  const ViResult r = value_iteration(mdp, cfg);
  const bool converged = r.residual <= cfg.epsilon;
  std::printf("solve: problem=%s states=%d actions=%d gamma=%g sweeps=%d residual=%.3e\n",
              problem_name(p).data(), g.n_states(), g.n_actions(), cfg.gamma, r.sweeps,
              r.residual);
  if (!converged)
    std::fprintf(stderr,
                 "warning: value iteration hit the sweep budget before reaching "
                 "epsilon=%.3e\n",
                 cfg.epsilon);
  write_matrix(resolve_out(o.out_dir, o.out), r.q);
  return 0;
}

struct CompressOpts {
  std::string in;
  std::string out;
  std::string out_dir;
  std::string stats;
  PcpOpts pcp;
};

int run_compress(const CompressOpts& o) {
  const Matrix q = read_matrix(o.in);
  const PcpConfig cfg = make_pcp_config(o.pcp, q.rows(), q.cols());
  const QCompression c = compress(q, cfg);

  const double total = static_cast<double>(q.rows()) * static_cast<double>(q.cols());
  std::printf(
      "compress: %ldx%ld lambda=%g iterations=%d residual=%.3e rank=%ld "
      "nnz_fraction=%.4f storage=%lld (%.2f%% of dense)\n",
      static_cast<long>(q.rows()), static_cast<long>(q.cols()), cfg.lambda,
      c.pcp.iterations, c.pcp.final_residual, static_cast<long>(c.pcp.numerical_rank),
      c.pcp.nnz_fraction, static_cast<long long>(c.model.storage_entries()),
      100.0 * static_cast<double>(c.model.storage_entries()) / total);
  if (!c.pcp.converged)
    std::fprintf(stderr,
                 "warning: pursuit stopped after %d iterations at residual %.3e "
                 "(target %.3e); writing the partial model\n",
                 c.pcp.iterations, c.pcp.final_residual, cfg.delta);

  write_compressed(resolve_out(o.out_dir, o.out), c.model);
  if (!o.stats.empty())
    write_pcp_stats(resolve_out(o.out_dir, o.stats), q.rows(), q.cols(), cfg, c.pcp,
                    c.model.storage_entries());
  return 0;
}

struct SimulateOpts {
  GridOpts grid;
  std::string q;
  std::string lrq;
  int episodes = 10000;
  std::optional<int> max_steps;
  std::uint64_t seed = 0;
  std::string out;
  std::string out_dir;
};

int run_simulate(const SimulateOpts& o) {
  const Problem p = problem_from_name(o.grid.problem);
  const Grid2D g = make_grid(o.grid);

  const Matrix q = read_matrix(o.q);
  check_grid_match(g, q.rows(), q.cols(), o.q);

  SimConfig cfg = default_sim_config(p);
  cfg.episodes = o.episodes;
  if (o.max_steps) cfg.max_steps = *o.max_steps;
  cfg.seed = o.seed;

  const auto run = [&](const PolicyFn& policy) {
    return p == Problem::MountainCar ? simulate_mountain_car(policy, g, cfg)
                                     : simulate_pendulum(policy, g, cfg);
  };

  const SimResult opt = run([&](ContinuousState s) { return continuous_policy(q, g, s); });

  std::vector<BenchReport> reports;
  if (!o.lrq.empty()) {
    const CompressedQ cq = read_compressed(o.lrq);
    check_grid_match(g, cq.rows(), cq.cols(), o.lrq);
    const SimResult comp =
        run([&](ContinuousState s) { return continuous_policy(cq, g, s); });
    reports.push_back(bench_report(p, q, cq, opt, comp));
  } else {
    BenchReport rep;
    rep.problem = std::string(problem_name(p));
    rep.metric_name = p == Problem::MountainCar ? "time_to_goal" : "deviation";
    rep.rows.push_back({"optimal", opt.mean, q.cols(), 0.0, q.rows() * q.cols(), 1.0});
    reports.push_back(rep);
  }

  write_report_csv(resolve_out(o.out_dir, o.out), reports);
  std::cout << render_report_table(reports);
  return 0;
}

struct ReportOpts {
  std::vector<std::string> in;
  std::string out;
  std::string out_dir;
  bool csv = false;
};

int run_report(const ReportOpts& o) {
  std::vector<BenchReport> all;
  for (const std::string& path : o.in) {
    auto part = read_report_csv(path);
    all.insert(all.end(), std::make_move_iterator(part.begin()),
               std::make_move_iterator(part.end()));
  }
  const std::string text = o.csv ? report_csv_string(all) : render_report_table(all);
  if (o.out.empty())
    std::cout << text;
  else
    write_text_file(resolve_out(o.out_dir, o.out), text);
  return 0;
}

struct HeatmapOpts {
  GridOpts grid;
  std::string q;
  std::string lrq;
  std::string out_q;
  std::string out_lrq;
  std::string out_dir;
};

int run_heatmap(const HeatmapOpts& o) {
  const Grid2D g = make_grid(o.grid);
  if (o.q.empty() != o.out_q.empty() || o.lrq.empty() != o.out_lrq.empty())
    throw std::invalid_argument("heatmap: --q pairs with --out-q and --lrq with --out-lrq");
  if (o.q.empty() && o.lrq.empty())
    throw std::invalid_argument("heatmap: nothing to do, pass --q and/or --lrq");

  if (!o.q.empty()) {
    const Matrix q = read_matrix(o.q);
    check_grid_match(g, q.rows(), q.cols(), o.q);
    write_heatmap(resolve_out(o.out_dir, o.out_q), extract_policy(q), g);
  }
  if (!o.lrq.empty()) {
    const CompressedQ cq = read_compressed(o.lrq);
    check_grid_match(g, cq.rows(), cq.cols(), o.lrq);
    write_heatmap(resolve_out(o.out_dir, o.out_lrq), extract_policy(cq), g);
  }
  return 0;
}

struct RpcaOpts {
  std::string in;
  std::string out_l;
  std::string out_s;
  std::string stats;
  std::string out_dir;
  PcpOpts pcp;
};

int run_rpca(const RpcaOpts& o) {
  const Matrix m = read_matrix(o.in);
  const PcpConfig cfg = make_pcp_config(o.pcp, m.rows(), m.cols());
  const PcpResult r = pcp_alm(m, cfg);

  std::printf("rpca: %ldx%ld lambda=%g iterations=%d converged=%s residual=%.3e rank=%ld "
              "nnz_fraction=%.4f\n",
              static_cast<long>(m.rows()), static_cast<long>(m.cols()), cfg.lambda,
              r.iterations, r.converged ? "yes" : "no", r.final_residual,
              static_cast<long>(r.numerical_rank), r.nnz_fraction);
  if (r.numerical_rank > 0) {
    const SvdFactors trunc{r.l_factors.u.leftCols(r.numerical_rank),
                           r.l_factors.sigma.head(r.numerical_rank),
                           r.l_factors.v.leftCols(r.numerical_rank)};
    const CoherenceStats st = coherence(trunc, m.rows(), m.cols());
    std::printf("rpca: coherence mu_u=%.3f mu_v=%.3f mu_uv=%.3f\n", st.mu_u, st.mu_v,
                st.mu_uv);
  }
  if (!r.converged)
    std::fprintf(stderr, "warning: pursuit stopped after %d iterations at residual %.3e\n",
                 r.iterations, r.final_residual);

  const std::int64_t storage =
      r.numerical_rank * (m.rows() + m.cols() + 1) + r.s.nnz();
  if (!o.out_l.empty()) write_matrix(resolve_out(o.out_dir, o.out_l), r.l);
  if (!o.out_s.empty()) write_matrix(resolve_out(o.out_dir, o.out_s), r.s.to_dense());
  if (!o.stats.empty())
    write_pcp_stats(resolve_out(o.out_dir, o.stats), m.rows(), m.cols(), cfg, r, storage);
  return 0;
}

struct RecoveryOpts {
  std::int64_t m = 200;
  std::int64_t n = 200;
  std::int64_t rank = 10;
  double sparsity = 0.05;
  double magnitude = 5.0;
  int trials = 20;
  std::uint64_t seed = 7;
  double delta = 1e-7;
  int max_iters = 1000;
  double tol = 1e-5;
};

int run_recovery_test(const RecoveryOpts& o) {
  if (o.trials < 1) throw std::invalid_argument("recovery-test: trials must be positive");
  int recovered = 0;
  for (int t = 0; t < o.trials; ++t) {
    const RecoveryInstance inst =
        synth_recovery_instance(o.m, o.n, o.rank, o.sparsity, o.magnitude, o.seed + t);
    PcpConfig cfg;
    cfg.lambda = default_lambda(o.m, o.n);
    cfg.delta = o.delta;
    cfg.max_iters = o.max_iters;
    const PcpResult r = pcp_alm(inst.m, cfg);

    const double l0_norm = inst.l0.norm();
    const double rel_err =
        l0_norm > 0.0 ? (r.l - inst.l0).norm() / l0_norm : r.l.norm();

    bool support = r.s.nnz() == inst.s0.nnz();
    for (Index k = 0; support && k < r.s.nnz(); ++k)
      support = r.s.entries()[static_cast<std::size_t>(k)].row ==
                    inst.s0.entries()[static_cast<std::size_t>(k)].row &&
                r.s.entries()[static_cast<std::size_t>(k)].col ==
                    inst.s0.entries()[static_cast<std::size_t>(k)].col;

    const bool ok = r.converged && rel_err <= o.tol && support;
    recovered += ok ? 1 : 0;
    std::printf("trial %d: iterations=%d rel_err=%.3e support=%s -> %s\n", t, r.iterations,
                rel_err, support ? "exact" : "wrong", ok ? "recovered" : "failed");
  }
  std::printf("recovered %d/%d trials (tolerance %g)\n", recovered, o.trials, o.tol);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"value function compression toolkit: grid MDP solving, low rank plus "
               "sparse matrix splitting, and closed-loop policy benchmarks"};
  app.require_subcommand(1);
  app.fallthrough();  // lets --config appear after the subcommand name
  app.set_config("--config", "",
                 "read options from an INI-style file; keys for a subcommand go in a "
                 "[subcommand] section");
  app.allow_config_extras(CLI::config_extras_mode::error);

  SolveOpts solve_opts;
  CLI::App* solve = app.add_subcommand("solve", "solve a problem by value iteration");
  add_grid_options(solve, solve_opts.grid);
  solve->add_option("--gamma", solve_opts.gamma,
                    "discount (default 1 for mountain-car, 0.95 for pendulum)");
  solve->add_option("--epsilon", solve_opts.epsilon, "sup-norm stopping tolerance")->capture_default_str();
  solve->add_option("--max-sweeps", solve_opts.max_sweeps, "sweep budget")->capture_default_str();
  solve->add_option("--out", solve_opts.out, "output matrix file")->required();
  solve->add_option("--out-dir", solve_opts.out_dir, "directory for relative outputs");

  CompressOpts compress_opts;
  CLI::App* compress_cmd =
      app.add_subcommand("compress", "split a value table into a compact model");
  compress_cmd->add_option("--in", compress_opts.in, "input matrix file")->required();
  compress_cmd->add_option("--out", compress_opts.out, "output model file")->required();
  compress_cmd->add_option("--stats", compress_opts.stats, "also write a stats CSV");
  compress_cmd->add_option("--out-dir", compress_opts.out_dir,
                           "directory for relative outputs");
  add_pcp_options(compress_cmd, compress_opts.pcp);

  SimulateOpts sim_opts;
  CLI::App* simulate =
      app.add_subcommand("simulate", "benchmark policies in closed loop");
  add_grid_options(simulate, sim_opts.grid);
  simulate->add_option("--q", sim_opts.q, "dense value table")->required();
  simulate->add_option("--lrq", sim_opts.lrq, "compressed model to compare against");
  simulate->add_option("--episodes", sim_opts.episodes, "episode count")->capture_default_str();
  simulate->add_option("--max-steps", sim_opts.max_steps,
                       "step budget (default 1000 for mountain-car, 100 for pendulum)");
  simulate->add_option("--seed", sim_opts.seed, "seed for the episode starts")->capture_default_str();
  simulate->add_option("--out", sim_opts.out, "output report CSV")->required();
  simulate->add_option("--out-dir", sim_opts.out_dir, "directory for relative outputs");

  ReportOpts report_opts;
  CLI::App* report = app.add_subcommand("report", "render benchmark reports");
  report->add_option("--in", report_opts.in, "report CSVs to merge")
      ->required()
      ->expected(-1);
  report->add_option("--out", report_opts.out, "output file (default stdout)");
  report->add_option("--out-dir", report_opts.out_dir, "directory for relative outputs");
  report->add_flag("--csv", report_opts.csv, "emit CSV instead of a text table");

  HeatmapOpts heatmap_opts;
  CLI::App* heatmap = app.add_subcommand("heatmap", "export policy heat maps");
  add_grid_options(heatmap, heatmap_opts.grid);
  heatmap->add_option("--q", heatmap_opts.q, "dense value table");
  heatmap->add_option("--out-q", heatmap_opts.out_q, "heat map CSV for --q");
  heatmap->add_option("--lrq", heatmap_opts.lrq, "compressed model");
  heatmap->add_option("--out-lrq", heatmap_opts.out_lrq, "heat map CSV for --lrq");
  heatmap->add_option("--out-dir", heatmap_opts.out_dir, "directory for relative outputs");

  RpcaOpts rpca_opts;
  CLI::App* rpca = app.add_subcommand("rpca", "split a matrix into low rank plus sparse");
  rpca->add_option("--in", rpca_opts.in, "input matrix file")->required();
  rpca->add_option("--out-l", rpca_opts.out_l, "write the low rank part");
  rpca->add_option("--out-s", rpca_opts.out_s, "write the sparse part (dense layout)");
  rpca->add_option("--stats", rpca_opts.stats, "also write a stats CSV");
  rpca->add_option("--out-dir", rpca_opts.out_dir, "directory for relative outputs");
  add_pcp_options(rpca, rpca_opts.pcp);

  RecoveryOpts recovery_opts;
  CLI::App* recovery =
      app.add_subcommand("recovery-test", "exact recovery experiment on seeded instances");
  recovery->add_option("--m", recovery_opts.m, "rows")->capture_default_str();
  recovery->add_option("--n", recovery_opts.n, "columns")->capture_default_str();
  recovery->add_option("--rank", recovery_opts.rank, "planted rank")->capture_default_str();
  recovery->add_option("--sparsity", recovery_opts.sparsity, "corrupted cell fraction")
      ->capture_default_str();
  recovery->add_option("--magnitude", recovery_opts.magnitude, "spike magnitude")->capture_default_str();
  recovery->add_option("--trials", recovery_opts.trials, "instance count")->capture_default_str();
  recovery->add_option("--seed", recovery_opts.seed, "base seed")->capture_default_str();
  recovery->add_option("--delta", recovery_opts.delta, "pursuit stopping tolerance")->capture_default_str();
  recovery->add_option("--max-iters", recovery_opts.max_iters, "pursuit budget")->capture_default_str();
  recovery->add_option("--tol", recovery_opts.tol, "relative recovery tolerance")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (solve->parsed()) return run_solve(solve_opts);
    if (compress_cmd->parsed()) return run_compress(compress_opts);
    if (simulate->parsed()) return run_simulate(sim_opts);
    if (report->parsed()) return run_report(report_opts);
    if (heatmap->parsed()) return run_heatmap(heatmap_opts);
    if (rpca->parsed()) return run_rpca(rpca_opts);
    if (recovery->parsed()) return run_recovery_test(recovery_opts);
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::out_of_range& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
