// Acceptance suite: runs every verification criterion at its pinned
// tolerance and prints one PASS/FAIL line per criterion. Exits nonzero if
// any criterion fails.
//
// Usage: acceptance <path-to-cli-binary> <path-to-configs-dir>
// (both are supplied by ctest; the CLI is needed for the reproducibility
// criterion).

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "core/grid.hpp"
#include "core/kernel.hpp"
#include "core/manifold.hpp"
#include "core/maxcal.hpp"
#include "core/maxent.hpp"
#include "core/mc.hpp"
#include "core/param_flow.hpp"
#include "core/pde.hpp"

using namespace fkflow;

namespace {

int g_failures = 0;

void report(int number, const std::string& name, bool pass, const std::string& detail) {
  std::printf("%s criterion %2d (%s): %s\n", pass ? "PASS" : "FAIL", number, name.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double lx = std::log(xs[i]);
    const double ly = std::log(ys[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// --------------------------------------------------------------------------

void criterion_1_stationary_limit() {
  const OuParams params(2.0, 0.5, 1.0);
  const ParamPoint flowed = ou_moment_flow(params, ParamPoint(2.0, 1.5), 20.0);
  const double mean_gap = std::abs(flowed.mean() - 0.5);
  const double var_gap = std::abs(flowed.variance() - 0.5);
  const bool flow_ok = mean_gap < 1e-8 && var_gap < 1e-8;

  const std::size_t n = 100000;
  const PathEnsemble ensemble =
      euler_maruyama(ou_sde(params), 2.0, 0.0, 10.0, 1e-3, n, 1234567, {10.0});
  const auto terminal = ensemble.column(ensemble.times.size() - 1);
  double sum = 0.0, sum2 = 0.0;
  for (double y : terminal) {
    sum += y;
    sum2 += y * y;
  }
  const double mc_mean = sum / static_cast<double>(n);
  const double mc_var = sum2 / static_cast<double>(n) - mc_mean * mc_mean;
  const double se_mean = std::sqrt(0.5 / static_cast<double>(n));
  const double se_var = 0.5 * std::sqrt(2.0 / static_cast<double>(n - 1));
  const bool mc_ok = std::abs(mc_mean - 0.5) < 3.0 * se_mean &&
                     std::abs(mc_var - 0.5) < 3.0 * se_var;

  report(1, "OU stationary limit", flow_ok && mc_ok,
         "flow gap mean=" + fmt(mean_gap) + " var=" + fmt(var_gap) +
             " (tol 1e-8); MC mean=" + fmt(mc_mean) + " var=" + fmt(mc_var) +
             " vs 0.5 within 3se (" + fmt(3.0 * se_mean) + ", " + fmt(3.0 * se_var) + ")");
}

void criterion_2_functor_commutation() {
  FunctorOptions options;
  options.dx = 0.01;
  options.dt = 1e-3;
  options.n_paths = 100000;
  options.seed = 1234567;
  const FunctorReport r =
      verify_functor(OuParams(1.0, 0.0, 1.0), ParamPoint(1.0, 1.0), 1.0, options);
  const bool ok = r.l1_param_pde < 0.02 && r.l1_param_mc < 0.02 && r.l1_pde_mc < 0.02;
  report(2, "functor commutation", ok,
         "L1 param/pde=" + fmt(r.l1_param_pde) + " param/mc=" + fmt(r.l1_param_mc) +
             " pde/mc=" + fmt(r.l1_pde_mc) + " (tol 0.02 each)");
}

void criterion_3_fk_vs_backward_pde() {
  const double lambda = 0.5;
  const SdeSpec sde = wiener_sde(0.0, lambda);
  const GeneratorSpec gen = wiener_generator(0.0, lambda);
  const auto terminal = [](double q) { return gaussian_pdf(q, 0.0, 1.0); };

  const Grid grid(-12.0, 12.0, 2401);
  PdeProblem problem;
  problem.generator = gen;
  problem.grid = grid;
  problem.t_end = 1.0;
  problem.direction = PdeDirection::backward;
  problem.boundary_data.resize(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) problem.boundary_data[i] = terminal(grid.point(i));
  problem.dt = 0.4 * cfl_limit(gen, grid, 0.0, 1.0);
  const PdeSolution pde = solve_backward(problem);

  std::size_t within = 0;
  const std::size_t points = 11;
  for (std::size_t i = 0; i < points; ++i) {
    const double q = -2.0 + 4.0 * static_cast<double>(i) / static_cast<double>(points - 1);
    const FkEstimate e =
        fk_estimate(sde, terminal, q, 0.0, 1.0, 1e-3, 100000, 1234567 + i);
    const double closed = gaussian_pdf(q, 0.0, 2.0);
    const auto gi = static_cast<std::size_t>(std::llround((q - grid.lo) / grid.dx()));
    const double u = pde.frames.front()[gi];
    if (std::abs(e.value - closed) <= 3.0 * e.std_error &&
        std::abs(e.value - u) <= 3.0 * e.std_error)
      ++within;
  }
  report(3, "Feynman-Kac vs backward PDE", within >= 10,
         std::to_string(within) + "/11 query points within 3 std errors of both the "
                                  "closed form and the PDE (need >= 10)");
}

void criterion_4_sewing_law() {
  // Exact three-state chain.
  const std::vector<double> p = {0.70, 0.20, 0.10, 0.30, 0.40, 0.30, 0.05, 0.25, 0.70};
  std::vector<double> p2(9, 0.0);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t m = 0; m < 3; ++m)
      for (std::size_t j = 0; j < 3; ++j) p2[i * 3 + j] += p[i * 3 + m] * p[m * 3 + j];
  const double chain_residual =
      sewing_check(TransitionKernel(3, p, 1.0), TransitionKernel(3, p, 1.0),
                   TransitionKernel(3, p2, 2.0));

  const OuParams params(1.0, 0.0, 1.0);
  const double span = 0.25;
  const auto residual_at = [&](double dx) {
    const auto cells =
        CellGrid::from_range(-12.0, 12.0, static_cast<std::size_t>(std::llround(24.0 / dx)));
    return sewing_check(exact_ou_kernel(params, cells, span),
                        exact_ou_kernel(params, cells, span),
                        exact_ou_kernel(params, cells, 2.0 * span));
  };
  const double coarse = residual_at(0.05);
  const double fine = residual_at(0.025);
  const bool ok = chain_residual < 1e-14 && coarse < 1e-3 && coarse / fine >= 1.8;
  report(4, "sewing law", ok,
         "3-state residual=" + fmt(chain_residual) + " (tol 1e-14); OU dx=0.05 residual=" +
             fmt(coarse) + " (tol 1e-3); refinement ratio=" + fmt(coarse / fine) +
             " (need >= 1.8)");
}

void criterion_5_dynkin_consistency() {
  const OuParams params(1.0, 0.0, 1.0);
  const GeneratorSpec gen = ou_generator(params);
  const Grid grid(-8.0, 8.0, 3201);
  const GridFunction f =
      GridFunction::sample(grid, [](double q) { return gaussian_pdf(q, 0.0, 1.0); });
  std::vector<double> hs = {1e-1, 1e-2, 1e-3};
  std::vector<double> residuals;
  for (double h : hs) {
    const TransitionKernel kernel = exact_ou_kernel(params, CellGrid::centered_on(grid), h,
                                                    KernelDiscretization::midpoint);
    residuals.push_back(dynkin_residual(kernel, gen, f, h));
  }
  const double slope = fit_slope(hs, residuals);
  report(5, "Dynkin consistency", std::abs(slope - 1.0) <= 0.15,
         "log-log slope=" + fmt(slope) + " over h in {1e-1,1e-2,1e-3} (need 1.0 +- 0.15)");
}

void criterion_6_maxent_recovery() {
  MaxEntProblem problem;
  problem.grid = Grid(-12.0, 12.0, 4001);
  problem.constraints = {[](double q) { return q; }, [](double q) { return q * q; }};
  problem.targets = {0.0, 1.0};
  const MaxEntSolution sol = maxent_density(problem);
  double linf = 0.0;
  for (std::size_t i = 0; i < problem.grid.n; ++i)
    linf = std::max(linf, std::abs(sol.density.values()[i] -
                                   gaussian_pdf(problem.grid.point(i), 0.0, 1.0)));
  const double mean_residual = std::abs(sol.density.mean());
  const double second = sol.density.variance() + sol.density.mean() * sol.density.mean();
  const double second_residual = std::abs(second - 1.0);
  const bool ok = linf < 1e-6 && mean_residual < 1e-8 && second_residual < 1e-8;
  report(6, "max-ent recovery", ok,
         "Linf vs N(0,1)=" + fmt(linf) + " (tol 1e-6); constraint residuals " +
             fmt(mean_residual) + ", " + fmt(second_residual) + " (tol 1e-8)");
}

void criterion_7_maxcal_oracle() {
  CaliberProblem problem;
  problem.n_states = 3;
  problem.horizon = 3;
  Observable j1;
  j1.time = 1;
  j1.values = {0.0, 1.0, 2.0};
  Observable j2;
  j2.time = 3;
  j2.values = {1.0, 0.0, 1.0};
  problem.observables = {j1, j2};
  problem.targets = {1.2, 0.4};
  problem = problem.completed();

  const MaxCalSolution sol = maxcal_solve(problem);
  const double tv =
      total_variation_paths(sol.measure.expand(), brute_force_paths(problem, sol.multipliers));
  const double gluing = gluing_factorization_check(sol.measure);
  const std::size_t wins = count_caliber_wins(problem, sol, 100, 1234567);
  const bool ok = tv < 1e-8 && gluing < 1e-12 && wins == 100;
  report(7, "max-caliber oracle equivalence", ok,
         "TV vs brute force=" + fmt(tv) + " (tol 1e-8); gluing residual=" + fmt(gluing) +
             " (tol 1e-12); caliber wins " + std::to_string(wins) + "/100");
}

void criterion_8_group_law() {
  const OuParams params(1.0, 0.3, 0.8);
  const FlowSpec flow = ou_flow(params);
  std::mt19937 gen(20240615);
  std::uniform_real_distribution<double> mean_dist(-2.0, 2.0);
  std::uniform_real_distribution<double> var_dist(0.1, 3.0);
  std::uniform_real_distribution<double> time_dist(0.0, 2.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const ParamPoint x0(mean_dist(gen), var_dist(gen));
    worst = std::max(worst, check_group_law(flow, x0, time_dist(gen), time_dist(gen)));
  }
  report(8, "group law", worst < 1e-12,
         "max residual over 100 random (x0,t,s)=" + fmt(worst) + " (tol 1e-12)");
}

struct CliRun {
  int exit_code = -1;
  std::map<std::string, std::string> artifacts;  // suffix -> content
};

CliRun run_cli(const std::string& cli, const std::string& config,
               const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::string command = "'" + cli + "' '" + config + "' --output-dir '" +
                              out_dir.string() + "' > /dev/null 2>&1";
  CliRun run;
  run.exit_code = std::system(command.c_str());
  for (const auto& entry : std::filesystem::directory_iterator(out_dir)) {
    const std::string name = entry.path().filename().string();
    const auto cut = name.rfind('-');
    const std::string suffix = cut == std::string::npos ? name : name.substr(cut + 1);
    std::ifstream in(entry.path(), std::ios::binary);
    std::stringstream buffer;
    buffer << in.rdbuf();
    run.artifacts[suffix] = buffer.str();
  }
  return run;
}

void criterion_9_reproducibility(const std::string& cli, const std::string& configs_dir) {
  const auto base = std::filesystem::temp_directory_path() / "fkflow-acceptance";
  std::filesystem::remove_all(base);
  bool ok = true;
  std::string detail;
  for (const std::string name : {"moments", "maxcal"}) {
    const std::string config = configs_dir + "/" + name + ".json";
    const CliRun a = run_cli(cli, config, base / (name + "-a"));
    const CliRun b = run_cli(cli, config, base / (name + "-b"));
    const bool same = a.exit_code == 0 && b.exit_code == 0 && !a.artifacts.empty() &&
                      a.artifacts == b.artifacts;
    ok = ok && same;
    detail += name + (same ? ": byte-identical (" : ": MISMATCH (") +
              std::to_string(a.artifacts.size()) + " artifacts); ";
  }
  report(9, "CLI reproducibility", ok, detail);
}

void criterion_10_convergence_orders() {
  // RK4 order against the closed form.
  const OuParams params(3.0, 0.2, 1.5);
  FlowSpec flow = ou_flow(params);
  flow.closed_form.reset();
  const ParamPoint x0(2.0, 1.0);
  const ParamPoint truth = ou_moment_flow(params, x0, 1.0);
  std::vector<double> dts = {1e-2, 5e-3, 2.5e-3};
  std::vector<double> rk4_errors;
  for (double dt : dts) {
    const ParamPoint x = integrate_flow(flow, x0, 1.0, dt);
    rk4_errors.push_back(std::max(std::abs(x.mean() - truth.mean()),
                                  std::abs(x.variance() - truth.variance())));
  }
  const double rk4_slope = fit_slope(dts, rk4_errors);

  // FTCS spatial order against the drifted Wiener closed form.
  const double lambda = 1.0, b = 1.0, s0 = 0.01, t = 0.25;
  const auto ftcs_error = [&](double dx) {
    const GeneratorSpec gen = wiener_generator(b, lambda);
    const Grid grid(-6.75, 5.75, static_cast<std::size_t>(std::llround(12.5 / dx)) + 1);
    PdeProblem problem;
    problem.generator = gen;
    problem.grid = grid;
    problem.t_end = t;
    problem.direction = PdeDirection::forward;
    std::vector<double> init(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) init[i] = gaussian_pdf(grid.point(i), 0.0, s0);
    problem.boundary_data = GridDensity::normalized(grid, std::move(init)).values();
    problem.dt = 0.4 * grid.dx() * grid.dx() / (2.0 * lambda);
    const PdeSolution sol = solve_forward(problem);
    double err = 0.0;
    for (std::size_t i = 0; i < grid.n; ++i)
      err = std::max(err, std::abs(sol.frames.back()[i] -
                                   gaussian_pdf(grid.point(i), -b * t, s0 + 2.0 * lambda * t)));
    return err;
  };
  const double ratio = ftcs_error(0.02) / ftcs_error(0.01);

  // Monte Carlo rate from the reported standard errors.
  const SdeSpec sde = wiener_sde(0.0, 0.5);
  std::vector<double> ns = {1e3, 1e4, 1e5};
  std::vector<double> ses;
  for (double n : ns) {
    const FkEstimate e = fk_estimate(
        sde, [](double q) { return gaussian_pdf(q, 0.0, 1.0); }, 0.0, 0.0, 1.0, 1e-3,
        static_cast<std::size_t>(n), 1234567);
    ses.push_back(e.std_error);
  }
  const double mc_slope = fit_slope(ns, ses);

  const bool ok = rk4_slope >= 3.8 && ratio >= 3.5 && ratio <= 4.5 &&
                  std::abs(mc_slope + 0.5) <= 0.1;
  report(10, "convergence orders", ok,
         "RK4 slope=" + fmt(rk4_slope) + " (need >= 3.8); FTCS halving ratio=" + fmt(ratio) +
             " (need in [3.5,4.5]); MC std-error slope=" + fmt(mc_slope) +
             " (need -0.5 +- 0.1)");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: acceptance <cli-binary> <configs-dir>\n");
    return 2;
  }
  const std::string cli = argv[1];
  const std::string configs_dir = argv[2];

  criterion_1_stationary_limit();
  criterion_2_functor_commutation();
  criterion_3_fk_vs_backward_pde();
  criterion_4_sewing_law();
  criterion_5_dynkin_consistency();
  criterion_6_maxent_recovery();
  criterion_7_maxcal_oracle();
  criterion_8_group_law();
  criterion_9_reproducibility(cli, configs_dir);
  criterion_10_convergence_orders();

  std::printf("%s: %d of 10 criteria failed\n", g_failures == 0 ? "SUCCESS" : "FAILURE",
              g_failures);
  return g_failures == 0 ? 0 : 1;
}
