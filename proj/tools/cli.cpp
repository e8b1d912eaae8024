// Experiment CLI. Every run is seeded and writes CSV only; plotting is left
// to external tools. Exit codes: 0 ok, 2 bad arguments, 3 divergence, 4 I/O.
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dop/csv.hpp"
#include "dop/harness.hpp"
#include "dop/linreg.hpp"
#include "dop/rng.hpp"

using namespace dop;

namespace {

// "0..9" (inclusive range) or "1,5,12"
std::vector<uint64_t> parse_seed_list(const std::string& text) {
  std::vector<uint64_t> seeds;
  if (const auto dots = text.find(".."); dots != std::string::npos) {
    const uint64_t lo = std::stoull(text.substr(0, dots));
    const uint64_t hi = std::stoull(text.substr(dots + 2));
    if (hi < lo) throw CLI::ValidationError("--seeds", "descending range");
    for (uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    return seeds;
  }
  size_t pos = 0;
  while (pos < text.size()) {
    size_t next = text.find(',', pos);
    if (next == std::string::npos) next = text.size();
    seeds.push_back(std::stoull(text.substr(pos, next - pos)));
    pos = next + 1;
  }
  return seeds;
}

double vec_rel_err(const Vec& est, const Vec& truth) {
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < est.size(); ++i) {
    num += (est[i] - truth[i]) * (est[i] - truth[i]);
    den += truth[i] * truth[i];
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

int cmd_solve(int n, int r, double p, double alpha, double tau, long iters,
              uint64_t seed, double init_std, const std::string& out) {
  const GroundTruth gt = gen_ground_truth(n, r, p, 10.0, seed);
  const MeasurementOp op = MeasurementOp::identity(n);
  Vec y = op.apply(gt.X_star);
  for (size_t i = 0; i < y.size(); ++i) y[i] += gt.s_star[i];

  SolverConfig cfg;
  cfg.alpha = alpha;
  cfg.tau = tau;
  cfg.max_iters = iters;
  cfg.init = GaussianStd{init_std, derive_seed(seed, 1)};
  const RecoveryResult res = solve(op, y, cfg);

  csv::Writer w(out);
  w.header({"iter", "loss"});
  for (const auto& [k, l] : res.loss_history) w.line({std::to_string(k), csv::fmt(l)});
  w.trailer("n", static_cast<double>(n));
  w.trailer("r", static_cast<double>(r));
  w.trailer("p", p);
  w.trailer("alpha", alpha);
  w.trailer("tau", tau);
  w.trailer("seed", static_cast<double>(seed));
  w.trailer("iters_run", static_cast<double>(res.iters_run));
  w.trailer("converged", res.converged ? 1.0 : 0.0);
  w.trailer("rel_err_X", relative_error(res.X_hat, gt.X_star));
  w.trailer("rel_err_s", vec_rel_err(res.s_hat, gt.s_star));
  w.trailer("gh_product_maxabs", res.gh_product_maxabs);
  w.close();
  return 0;
}

int cmd_alpha_sweep(int n, int r, double p, const std::string& alphas_text,
                    const std::string& seeds_text, double tau, long iters,
                    const std::string& out) {
  std::vector<double> alphas;
  {
    size_t pos = 0;
    while (pos < alphas_text.size()) {
      size_t next = alphas_text.find(',', pos);
      if (next == std::string::npos) next = alphas_text.size();
      alphas.push_back(std::stod(alphas_text.substr(pos, next - pos)));
      pos = next + 1;
    }
  }
  SweepSetup setup;
  setup.n = n;
  setup.r = r;
  setup.p = p;
  setup.tau = tau;
  setup.max_iters = iters;
  const auto rows = alpha_sweep(setup, alphas, parse_seed_list(seeds_text));

  csv::Writer w(out);
  w.header({"alpha", "mean_rel_err_X", "mean_rel_err_s", "diverged"});
  for (const auto& row : rows)
    w.line({csv::fmt(row.alpha), csv::fmt(row.mean_rel_err_X),
            csv::fmt(row.mean_rel_err_s), std::to_string(row.diverged)});
  w.close();
  return 0;
}

int cmd_phase_grid(int n, const std::string& r_text, const std::string& p_text,
                   int trials, const std::string& method, double alpha, double lambda,
                   uint64_t seed, long iters, const std::string& out) {
  std::vector<int> r_values;
  Vec p_values;
  {
    size_t pos = 0;
    while (pos < r_text.size()) {
      size_t next = r_text.find(',', pos);
      if (next == std::string::npos) next = r_text.size();
      r_values.push_back(std::stoi(r_text.substr(pos, next - pos)));
      pos = next + 1;
    }
    pos = 0;
    while (pos < p_text.size()) {
      size_t next = p_text.find(',', pos);
      if (next == std::string::npos) next = p_text.size();
      p_values.push_back(std::stod(p_text.substr(pos, next - pos)));
      pos = next + 1;
    }
  }

  PhaseMethod pm;
  if (method == "dop") {
    DopMethod dm;
    dm.alpha = alpha > 0.0 ? alpha : std::sqrt(static_cast<double>(n));
    dm.max_iters = iters;
    pm = dm;
  } else if (method == "convex") {
    ConvexMethod cm;
    cm.lambda = lambda > 0.0 ? lambda : 1.0 / std::sqrt(static_cast<double>(n));
    pm = cm;
  } else {
    throw CLI::ValidationError("--method", "must be dop or convex");
  }

  const PhaseGridResult res = phase_grid(n, r_values, p_values, trials, pm, seed);

  csv::Writer w(out);
  w.header({"r", "p", "success_fraction", "mean_rel_err"});
  for (size_t ri = 0; ri < r_values.size(); ++ri)
    for (size_t pi = 0; pi < p_values.size(); ++pi)
      w.line({std::to_string(r_values[ri]), csv::fmt(p_values[pi]),
              csv::fmt(res.at(ri, pi)),
              csv::fmt(res.mean_rel_err[ri * p_values.size() + pi])});
  w.close();
  return 0;
}

int cmd_verify_theory(int n, int m, double gamma, double alpha, double tau, long iters,
                      uint64_t seed, const std::string& out) {
  const TheoryInstance inst = make_certified_diagonal_instance(n, m, alpha, seed);

  SolverConfig cfg;
  cfg.alpha = alpha;
  cfg.tau = tau;
  cfg.max_iters = iters;
  cfg.init = TheoryGamma{gamma};
  const RecoveryResult res = solve(inst.op, inst.y, cfg, /*record_snapshots=*/true);

  const TheoremReport rep = verify_theorem1(res, inst.op, inst.y, alpha, gamma, 1e-2);
  const double flow_dev = check_flow_closed_form(res.snapshots, inst.op, gamma, alpha);

  csv::Writer w(out);
  w.header({"check", "value"});
  w.line({"feasibility", csv::fmt(rep.feasibility)});
  w.line({"eig_excess", csv::fmt(rep.eig_excess)});
  w.line({"range_residual", csv::fmt(rep.range_residual)});
  w.line({"sign_residual", csv::fmt(rep.sign_residual)});
  w.line({"gh_rel", csv::fmt(rep.gh_rel)});
  w.line({"flow_max_rel_dev", csv::fmt(flow_dev)});
  w.trailer("pass", rep.pass(1e-2) ? 1.0 : 0.0);
  w.trailer("iters_run", static_cast<double>(res.iters_run));
  w.close();
  return 0;
}

int cmd_linreg_demo(int n1, int n2, const std::string& weights_text, double tau,
                    long iters, uint64_t seed, const std::string& out) {
  LinRegProblem p;
  p.W = Matrix(n1, n2);
  Rng rng(seed);
  for (double& v : p.W.flat()) v = rng.normal();
  p.b.resize(n1);
  for (double& v : p.b) v = rng.normal();

  if (weights_text == "uniform") {
    p.weights.assign(n2, 1.0);
  } else {
    p.weights.clear();
    size_t pos = 0;
    while (pos < weights_text.size()) {
      size_t next = weights_text.find(',', pos);
      if (next == std::string::npos) next = weights_text.size();
      p.weights.push_back(std::stod(weights_text.substr(pos, next - pos)));
      pos = next + 1;
    }
  }
  p.validate();

  const double bound = gram_spectral_norm(p);
  const double step = tau > 0.0 ? tau : 0.5 / bound;
  const Vec theta_gd = weighted_gd(p, step, iters, Vec(n2, 0.0));
  const Vec theta_weighted = weighted_min_norm_solution(p);
  const Vec theta_plain = min_norm_solution(p);

  csv::Writer w(out);
  w.header({"coordinate", "theta_gd", "theta_weighted_min_norm", "theta_min_norm"});
  for (int j = 0; j < n2; ++j)
    w.line({std::to_string(j), csv::fmt(theta_gd[j]), csv::fmt(theta_weighted[j]),
            csv::fmt(theta_plain[j])});
  double dev = 0.0;
  for (int j = 0; j < n2; ++j) dev = std::max(dev, std::abs(theta_gd[j] - theta_weighted[j]));
  w.trailer("max_abs_dev_from_weighted_closed_form", dev);
  w.trailer("tau", step);
  w.close();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-rank plus sparse recovery via over-parameterized gradient descent"};
  app.require_subcommand(1);

  // solve
  int n = 50, r = 5, trials = 10, m = 8, n1 = 5, n2 = 20;
  double p = 0.3, alpha = 0.0, tau = 1e-4, init_std = 1e-4, lambda = 0.0,
         gamma = 1e-3;
  long iters = 20000;
  uint64_t seed = 0;
  std::string out, alphas, seeds = "0..9", r_values, p_values, method = "dop",
                   weights = "uniform";

  auto* solve_cmd = app.add_subcommand("solve", "single recovery run");
  solve_cmd->add_option("--n", n);
  solve_cmd->add_option("--r", r);
  solve_cmd->add_option("--p", p);
  solve_cmd->add_option("--alpha", alpha);
  solve_cmd->add_option("--tau", tau);
  solve_cmd->add_option("--iters", iters);
  solve_cmd->add_option("--seed", seed);
  solve_cmd->add_option("--init-std", init_std);
  solve_cmd->add_option("--out", out)->required();

  auto* sweep_cmd = app.add_subcommand("alpha-sweep", "mean error vs alpha");
  sweep_cmd->add_option("--n", n);
  sweep_cmd->add_option("--r", r);
  sweep_cmd->add_option("--p", p);
  sweep_cmd->add_option("--alphas", alphas)->required();
  sweep_cmd->add_option("--seeds", seeds);
  sweep_cmd->add_option("--tau", tau);
  sweep_cmd->add_option("--iters", iters);
  sweep_cmd->add_option("--out", out)->required();

  auto* grid_cmd = app.add_subcommand("phase-grid", "success fraction over (r, p)");
  grid_cmd->add_option("--n", n);
  grid_cmd->add_option("--r-values", r_values)->required();
  grid_cmd->add_option("--p-values", p_values)->required();
  grid_cmd->add_option("--trials", trials);
  grid_cmd->add_option("--method", method);
  grid_cmd->add_option("--alpha", alpha);
  grid_cmd->add_option("--lambda", lambda);
  grid_cmd->add_option("--seed", seed);
  grid_cmd->add_option("--iters", iters);
  grid_cmd->add_option("--out", out)->required();

  auto* theory_cmd = app.add_subcommand(
      "verify-theory", "certificate residuals on a commuting instance");
  theory_cmd->add_option("--n", n)->capture_default_str();
  theory_cmd->add_option("--m", m);
  theory_cmd->add_option("--gamma", gamma);
  theory_cmd->add_option("--alpha", alpha);
  theory_cmd->add_option("--tau", tau);
  theory_cmd->add_option("--iters", iters);
  theory_cmd->add_option("--seed", seed);
  theory_cmd->add_option("--out", out)->required();

  auto* linreg_cmd = app.add_subcommand("linreg-demo", "weighted min-norm bias demo");
  linreg_cmd->add_option("--n1", n1);
  linreg_cmd->add_option("--n2", n2);
  linreg_cmd->add_option("--weights", weights);
  linreg_cmd->add_option("--tau", tau);
  linreg_cmd->add_option("--iters", iters);
  linreg_cmd->add_option("--seed", seed);
  linreg_cmd->add_option("--out", out)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve_cmd->parsed()) {
      const double a = alpha > 0.0 ? alpha : std::sqrt(static_cast<double>(n));
      return cmd_solve(n, r, p, a, tau, iters, seed, init_std, out);
    }
    if (sweep_cmd->parsed())
      return cmd_alpha_sweep(n, r, p, alphas, seeds, tau, iters, out);
    if (grid_cmd->parsed())
      return cmd_phase_grid(n, r_values, p_values, trials, method, alpha, lambda,
                            seed, iters, out);
    if (theory_cmd->parsed()) {
      const double a = alpha > 0.0 ? alpha : 2.0;
      const long it = iters == 20000 ? 2000000 : iters;
      const double t = tau == 1e-4 ? 1e-5 : tau;
      return cmd_verify_theory(n == 50 ? 6 : n, m, gamma, a, t, it, seed, out);
    }
    if (linreg_cmd->parsed())
      return cmd_linreg_demo(n1, n2, weights, tau == 1e-4 ? 0.0 : tau, iters, seed, out);
  } catch (const DivergenceError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::ios_base::failure& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    const bool io = msg.find("open") != std::string::npos ||
                    msg.find("write") != std::string::npos;
    std::fprintf(stderr, "error: %s\n", msg.c_str());
    return io ? 4 : 3;
  }
  return 2;
}
