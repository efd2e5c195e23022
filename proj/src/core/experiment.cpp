#include "core/experiment.hpp"

#include <cmath>
#include <numbers>

#include "core/errors.hpp"
#include "core/grid.hpp"
#include "core/kernel.hpp"
#include "core/manifold.hpp"
#include "core/maxcal.hpp"
#include "core/maxent.hpp"
#include "core/mc.hpp"
#include "core/param_flow.hpp"
#include "core/pde.hpp"
#include "core/rng.hpp"

namespace fkflow {
namespace {

using nlohmann::json;

// Collects config problems so they can be reported field by field.
class ConfigReader {
 public:
  explicit ConfigReader(const json& root) : root_(root) {}

  double number(const std::string& section, const std::string& key, double fallback) {
    const json* v = find(section, key);
    if (!v) return fallback;
    if (!v->is_number()) {
      errors_.push_back(path(section, key) + ": expected a number");
      return fallback;
    }
    return v->get<double>();
  }

  double positive(const std::string& section, const std::string& key, double fallback) {
    const double v = number(section, key, fallback);
    if (!(v > 0.0)) errors_.push_back(path(section, key) + ": must be positive");
    return v;
  }

  double nonnegative(const std::string& section, const std::string& key, double fallback) {
    const double v = number(section, key, fallback);
    if (!(v >= 0.0)) errors_.push_back(path(section, key) + ": must be nonnegative");
    return v;
  }

  std::uint64_t count(const std::string& section, const std::string& key,
                      std::uint64_t fallback) {
    const json* v = find(section, key);
    if (!v) return fallback;
    if (!v->is_number_integer() && !v->is_number_unsigned()) {
      errors_.push_back(path(section, key) + ": expected an integer");
      return fallback;
    }
    const auto value = v->get<long long>();
    if (value < 0) {
      errors_.push_back(path(section, key) + ": must be nonnegative");
      return fallback;
    }
    return static_cast<std::uint64_t>(value);
  }

  std::string text(const std::string& section, const std::string& key,
                   const std::string& fallback) {
    const json* v = find(section, key);
    if (!v) return fallback;
    if (!v->is_string()) {
      errors_.push_back(path(section, key) + ": expected a string");
      return fallback;
    }
    return v->get<std::string>();
  }

  const json* find(const std::string& section, const std::string& key) const {
    const json* node = &root_;
    if (!section.empty()) {
      auto it = root_.find(section);
      if (it == root_.end()) return nullptr;
      if (!it->is_object()) return nullptr;
      node = &*it;
    }
    auto it = node->find(key);
    return it == node->end() || it->is_null() ? nullptr : &*it;
  }

  void add_error(const std::string& message) { errors_.push_back(message); }

  void finish() const {
    if (errors_.empty()) return;
    std::string joined = "invalid config:";
    for (const auto& e : errors_) joined += "\n  - " + e;
    throw InvalidArgument(joined);
  }

 private:
  static std::string path(const std::string& section, const std::string& key) {
    return section.empty() ? key : section + "." + key;
  }
  const json& root_;
  std::vector<std::string> errors_;
};

struct CommonConfig {
  double b, k, lambda, m0, s0, q0;
  std::string family;
  double t, dt, dx;
  std::uint64_t n_paths, seed;
};

CommonConfig read_common(ConfigReader& reader, const CommonConfig& defaults) {
  CommonConfig c = defaults;
  c.family = reader.text("process", "family", defaults.family);
  if (c.family != "ou" && c.family != "wiener")
    reader.add_error("process.family: must be \"ou\" or \"wiener\"");
  c.b = reader.number("process", "b", defaults.b);
  c.k = reader.number("process", "k", defaults.k);
  c.lambda = reader.positive("process", "lambda", defaults.lambda);
  c.m0 = reader.number("process", "m0", defaults.m0);
  c.s0 = reader.nonnegative("process", "s0", defaults.s0);
  c.q0 = reader.number("process", "q0", defaults.q0);
  if (c.family == "ou" && !(c.b > 0.0))
    reader.add_error("process.b: must be positive for the OU family");
  c.t = reader.nonnegative("numerics", "t", defaults.t);
  c.dt = reader.positive("numerics", "dt", defaults.dt);
  c.dx = reader.positive("numerics", "dx", defaults.dx);
  c.n_paths = reader.count("numerics", "n_paths", defaults.n_paths);
  if (c.n_paths == 0) reader.add_error("numerics.n_paths: must be at least 1");
  c.seed = reader.count("numerics", "seed", defaults.seed);
  return c;
}

ProcessSpec make_process(const CommonConfig& c) {
  if (c.family == "ou") return OuParams(c.b, c.k, c.lambda);
  return WienerProcess{c.b, c.lambda};
}

CheckResult below(const std::string& name, double value, double tolerance) {
  return CheckResult{name, value, tolerance, value < tolerance};
}

CheckResult at_least(const std::string& name, double value, double tolerance) {
  return CheckResult{name, value, tolerance, value >= tolerance};
}

std::string csv_header(std::initializer_list<const char*> columns) {
  std::string out;
  bool first = true;
  for (const char* c : columns) {
    if (!first) out += ',';
    out += c;
    first = false;
  }
  out += '\n';
  return out;
}

void csv_append(std::string& out, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) out += ',';
    out += format_double(v);
    first = false;
  }
  out += '\n';
}

// ---------------------------------------------------------------------------
// moments

ExperimentResult run_moments(const json& config) {
  ConfigReader reader(config);
  CommonConfig c = read_common(
      reader, {2.0, 0.5, 1.0, 2.0, 1.5, 0.0, "ou", 20.0, 1e-3, 0.01, 100000, kDefaultSeed});
  const double tol_identity = reader.positive("tolerances", "identity_at_zero", 1e-14);
  const double tol_rk4 = reader.positive("tolerances", "closed_vs_rk4", 1e-9);
  const double tol_group = reader.positive("tolerances", "group_law_residual", 1e-12);
  const double tol_stationary = reader.positive("tolerances", "stationary_error", 1e-8);
  reader.finish();

  const OuParams params(c.family == "ou" ? c.b : 1.0, c.k, c.lambda);
  const ParamPoint x0(c.m0, c.s0);
  const FlowSpec flow = ou_flow(params);

  ExperimentResult result;
  result.experiment = "moments";

  const ParamPoint at_zero = ou_moment_flow(params, x0, 0.0);
  result.checks.push_back(below(
      "identity_at_zero",
      std::max(std::abs(at_zero.mean() - x0.mean()), std::abs(at_zero.variance() - x0.variance())),
      tol_identity));

  const double t_small = std::min(c.t, 1.0);
  const ParamPoint closed = ou_moment_flow(params, x0, t_small);
  const ParamPoint rk4 = integrate_flow(flow, x0, t_small, c.dt);
  result.checks.push_back(below(
      "closed_vs_rk4",
      std::max(std::abs(closed.mean() - rk4.mean()), std::abs(closed.variance() - rk4.variance())),
      tol_rk4));

  result.checks.push_back(
      below("group_law_residual", check_group_law(flow, x0, 0.3, 0.7), tol_group));

  const ParamPoint late = ou_moment_flow(params, x0, c.t);
  result.checks.push_back(below("stationary_mean_error",
                                std::abs(late.mean() - params.stationary_mean), tol_stationary));
  result.checks.push_back(below("stationary_variance_error",
                                std::abs(late.variance() - params.stationary_variance()),
                                tol_stationary));

  std::string csv = csv_header({"t", "m_closed", "s_closed", "m_rk4", "s_rk4"});
  const std::size_t samples = 101;
  for (std::size_t i = 0; i < samples; ++i) {
    const double ti = c.t * static_cast<double>(i) / static_cast<double>(samples - 1);
    const ParamPoint a = ou_moment_flow(params, x0, ti);
    const ParamPoint b = integrate_flow(flow, x0, ti, std::max(c.dt, ti / 5000.0));
    csv_append(csv, {ti, a.mean(), a.variance(), b.mean(), b.variance()});
  }
  result.artifacts.push_back({"trajectory.csv", std::move(csv)});
  return result;
}

// ---------------------------------------------------------------------------
// functor

ExperimentResult run_functor(const json& config) {
  ConfigReader reader(config);
  CommonConfig c = read_common(
      reader, {1.0, 0.0, 1.0, 1.0, 1.0, 0.0, "ou", 1.0, 1e-3, 0.01, 100000, kDefaultSeed});
  FunctorOptions options;
  options.dx = c.dx;
  options.dt = c.dt;
  options.n_paths = c.n_paths;
  options.seed = c.seed;
  options.tol_param_pde = reader.positive("tolerances", "l1_param_vs_pde", 1e-2);
  options.tol_param_mc = reader.positive("tolerances", "l1_param_vs_mc", 0.02);
  options.tol_pde_mc = reader.positive("tolerances", "l1_pde_vs_mc", 0.02);
  reader.finish();

  const FunctorReport report =
      verify_functor(make_process(c), ParamPoint(c.m0, c.s0), c.t, options);

  ExperimentResult result;
  result.experiment = "functor";
  result.checks.push_back(
      below("l1_param_vs_pde", report.l1_param_pde, options.tol_param_pde));
  result.checks.push_back(below("l1_param_vs_mc", report.l1_param_mc, options.tol_param_mc));
  result.checks.push_back(below("l1_pde_vs_mc", report.l1_pde_mc, options.tol_pde_mc));
  // Statistical-band versions of the Monte Carlo comparisons.
  result.checks.push_back(
      below("l1_param_vs_mc_within_3x_bound", report.l1_param_mc, 3.0 * report.mc_l1_bound));
  result.checks.push_back(
      below("l1_pde_vs_mc_within_3x_bound", report.l1_pde_mc, 3.0 * report.mc_l1_bound));

  std::string csv = csv_header({"q", "density_param", "density_pde", "density_mc"});
  for (std::size_t i = 0; i < report.grid.n; ++i)
    csv_append(csv, {report.grid.point(i), report.density_param[i], report.density_pde[i],
                     report.density_mc[i]});
  result.artifacts.push_back({"densities.csv", std::move(csv)});
  return result;
}

// ---------------------------------------------------------------------------
// sewing

double ou_sewing_residual(const OuParams& params, double span, double dx, double half_width) {
  const auto n_cells = static_cast<std::size_t>(std::llround(2.0 * half_width / dx));
  const CellGrid cells = CellGrid::from_range(-half_width, half_width, n_cells);
  const TransitionKernel k1 = exact_ou_kernel(params, cells, span);
  const TransitionKernel k12 = exact_ou_kernel(params, cells, 2.0 * span);
  return sewing_check(k1, k1, k12);
}

ExperimentResult run_sewing(const json& config) {
  ConfigReader reader(config);
  CommonConfig c = read_common(
      reader, {1.0, 0.0, 1.0, 0.0, 1.0, 0.0, "ou", 0.25, 1e-3, 0.05, 100000, kDefaultSeed});
  const double half_width = reader.positive("numerics", "grid_half_width", 12.0);
  const double tol_chain = reader.positive("tolerances", "chain3_residual", 1e-14);
  const double tol_ou = reader.positive("tolerances", "ou_residual", 1e-3);
  const double tol_ratio = reader.positive("tolerances", "refinement_ratio", 1.8);
  reader.finish();

  ExperimentResult result;
  result.experiment = "sewing";

  // Exact three-state chain: k1 = k2 = P, k12 = P^2 multiplied out directly.
  {
    const std::vector<double> p = {0.70, 0.20, 0.10, 0.30, 0.40, 0.30, 0.05, 0.25, 0.70};
    std::vector<double> p2(9, 0.0);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t m = 0; m < 3; ++m)
        for (std::size_t j = 0; j < 3; ++j) p2[i * 3 + j] += p[i * 3 + m] * p[m * 3 + j];
    const TransitionKernel kp(3, p, 1.0);
    const TransitionKernel kp2(3, p2, 2.0);
    result.checks.push_back(below("chain3_residual", sewing_check(kp, kp, kp2), tol_chain));
  }

  const OuParams params(c.b, c.k, c.lambda);
  const double coarse = ou_sewing_residual(params, c.t, c.dx, half_width);
  const double fine = ou_sewing_residual(params, c.t, c.dx / 2.0, half_width);
  result.checks.push_back(below("ou_residual", coarse, tol_ou));
  result.checks.push_back(at_least("refinement_ratio", coarse / fine, tol_ratio));

  std::string csv = csv_header({"dx", "residual"});
  csv_append(csv, {c.dx, coarse});
  csv_append(csv, {c.dx / 2.0, fine});
  result.artifacts.push_back({"residuals.csv", std::move(csv)});
  return result;
}

// ---------------------------------------------------------------------------
// fk-backward

ExperimentResult run_fk_backward(const json& config) {
  ConfigReader reader(config);
  CommonConfig c = read_common(
      reader, {0.0, 0.0, 0.5, 0.0, 1.0, 0.0, "wiener", 1.0, 1e-3, 0.01, 100000, kDefaultSeed});
  const double query_half_width = reader.positive("numerics", "query_half_width", 2.0);
  const auto n_query = reader.count("numerics", "query_points", 11);
  const double tol_points = reader.positive("tolerances", "points_within_bands", 10.0);
  const double tol_pde = reader.positive("tolerances", "pde_vs_closed_linf", 1e-3);
  reader.finish();

  // Terminal condition: standard normal density at t_end = t; query at time 0.
  const double horizon = c.t;
  const auto terminal = [](double q) { return gaussian_pdf(q, 0.0, 1.0); };
  const double closed_variance = 1.0 + 2.0 * c.lambda * horizon;

  const SdeSpec sde = wiener_sde(c.b, c.lambda);
  const GeneratorSpec gen = wiener_generator(c.b, c.lambda);
  const Grid grid(-12.0, 12.0, static_cast<std::size_t>(std::llround(24.0 / c.dx)) + 1);

  PdeProblem problem;
  problem.generator = gen;
  problem.grid = grid;
  problem.t_start = 0.0;
  problem.t_end = horizon;
  problem.direction = PdeDirection::backward;
  problem.boundary_data.resize(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) problem.boundary_data[i] = terminal(grid.point(i));
  problem.dt = 0.4 * cfl_limit(gen, grid, 0.0, horizon);
  problem.record_times = {0.5 * horizon};
  const PdeSolution backward = solve_backward(problem);
  const std::vector<double>& u0 = backward.frames.front();

  ExperimentResult result;
  result.experiment = "fk-backward";
  std::string csv = csv_header({"q", "fk_value", "fk_stderr", "pde_value", "closed_value"});
  std::size_t within = 0;
  double pde_err = 0.0;
  for (std::size_t i = 0; i < n_query; ++i) {
    const double q = -query_half_width +
                     2.0 * query_half_width * static_cast<double>(i) /
                         static_cast<double>(n_query - 1);
    const FkEstimate fk = fk_estimate(sde, terminal, q, 0.0, horizon, c.dt, c.n_paths,
                                      c.seed + i);
    // Closed form: convolution of two centered normals evaluated at the
    // drifted mean.
    const double closed = gaussian_pdf(q - c.b * horizon, 0.0, closed_variance);
    // Nearest grid value of the backward solution at time 0.
    const auto gi = static_cast<std::size_t>(std::llround((q - grid.lo) / grid.dx()));
    const double pde = u0[gi];
    pde_err = std::max(pde_err, std::abs(pde - closed));
    const double band = 3.0 * fk.std_error;
    if (std::abs(fk.value - closed) <= band && std::abs(fk.value - pde) <= band) ++within;
    csv_append(csv, {q, fk.value, fk.std_error, pde, closed});
  }
  result.checks.push_back(
      at_least("points_within_bands", static_cast<double>(within), tol_points));
  result.checks.push_back(below("pde_vs_closed_linf", pde_err, tol_pde));
  result.artifacts.push_back({"fk_backward.csv", std::move(csv)});

  std::vector<GridFunction> frames;
  frames.reserve(backward.frames.size());
  for (const auto& values : backward.frames) frames.emplace_back(grid, values);
  result.artifacts.push_back({"backward_series.csv", to_csv(backward.times, frames)});
  return result;
}

// ---------------------------------------------------------------------------
// maxent

ExperimentResult run_maxent(const json& config) {
  ConfigReader reader(config);
  const double target_mean = reader.number("targets", "mean", 0.0);
  const double target_second = reader.positive("targets", "second_moment", 1.0);
  const double half_width = reader.positive("numerics", "grid_half_width", 12.0);
  const auto n_points = reader.count("numerics", "grid_points", kDefaultGridPoints);
  const double tol_linf = reader.positive("tolerances", "linf_vs_gaussian", 1e-6);
  const double tol_residual = reader.positive("tolerances", "constraint_residual", 1e-8);
  reader.finish();
  require(target_second > target_mean * target_mean,
          "targets.second_moment must exceed mean^2");

  MaxEntProblem problem;
  problem.grid = Grid(-half_width, half_width, n_points);
  problem.constraints = {[](double q) { return q; }, [](double q) { return q * q; }};
  problem.targets = {target_mean, target_second};
  const MaxEntSolution solution = maxent_density(problem);

  const double mean = target_mean;
  const double variance = target_second - target_mean * target_mean;
  double linf = 0.0;
  for (std::size_t i = 0; i < problem.grid.n; ++i)
    linf = std::max(linf, std::abs(solution.density.values()[i] -
                                   gaussian_pdf(problem.grid.point(i), mean, variance)));

  const double got_mean = solution.density.mean();
  const double got_second = solution.density.variance() + got_mean * got_mean;

  ExperimentResult result;
  result.experiment = "maxent";
  result.checks.push_back(below("linf_vs_gaussian", linf, tol_linf));
  result.checks.push_back(
      below("constraint_residual_mean", std::abs(got_mean - target_mean), tol_residual));
  result.checks.push_back(below("constraint_residual_second_moment",
                                std::abs(got_second - target_second), tol_residual));

  std::string csv = csv_header({"q", "p", "gaussian"});
  for (std::size_t i = 0; i < problem.grid.n; ++i)
    csv_append(csv, {problem.grid.point(i), solution.density.values()[i],
                     gaussian_pdf(problem.grid.point(i), mean, variance)});
  result.artifacts.push_back({"density.csv", std::move(csv)});
  return result;
}

// ---------------------------------------------------------------------------
// maxcal

CaliberProblem maxcal_problem_from_config(ConfigReader& reader) {
  CaliberProblem problem;
  problem.n_states = 3;
  problem.horizon = 3;
  {
    Observable j1;
    j1.time = 1;
    j1.values = {0.0, 1.0, 2.0};  // state index
    Observable j2;
    j2.time = 3;
    j2.values = {1.0, 0.0, 1.0};  // squared distance from the middle state
    problem.observables = {j1, j2};
    problem.targets = {1.2, 0.4};
  }
  const json* spec = reader.find("", "maxcal_problem");
  if (!spec) return problem;
  if (!spec->is_object()) {
    reader.add_error("maxcal_problem: expected an object");
    return problem;
  }
  try {
    problem.n_states = spec->value("n_states", problem.n_states);
    problem.horizon = spec->value("horizon", problem.horizon);
    problem.observables.clear();
    problem.targets.clear();
    if (spec->contains("observables")) {
      for (const auto& o : spec->at("observables")) {
        Observable obs;
        obs.time = o.at("time").get<std::size_t>();
        if (o.contains("values")) {
          obs.values = o.at("values").get<std::vector<double>>();
        } else {
          const std::string fn = o.value("fn", "state");
          obs.values.resize(problem.n_states);
          for (std::size_t s = 0; s < problem.n_states; ++s) {
            const auto x = static_cast<double>(s);
            if (fn == "state")
              obs.values[s] = x;
            else if (fn == "state_squared")
              obs.values[s] = x * x;
            else if (fn == "indicator")
              obs.values[s] = s == o.value("arg", std::size_t{0}) ? 1.0 : 0.0;
            else
              throw InvalidArgument("maxcal_problem.observables: unknown fn \"" + fn + "\"");
          }
        }
        problem.observables.push_back(std::move(obs));
      }
    }
    if (spec->contains("targets"))
      problem.targets = spec->at("targets").get<std::vector<double>>();
    if (spec->contains("base_kernel")) {
      problem.base_kernel.clear();
      for (const auto& row : spec->at("base_kernel"))
        for (const auto& v : row) problem.base_kernel.push_back(v.get<double>());
    }
    if (spec->contains("base_initial"))
      problem.base_initial = spec->at("base_initial").get<std::vector<double>>();
  } catch (const json::exception& e) {
    reader.add_error(std::string("maxcal_problem: ") + e.what());
  }
  return problem;
}

ExperimentResult run_maxcal(const json& config) {
  ConfigReader reader(config);
  const auto seed = reader.count("numerics", "seed", kDefaultSeed);
  const auto n_perturbations = reader.count("numerics", "perturbations", 100);
  const double tol_tv = reader.positive("tolerances", "tv_vs_bruteforce", 1e-8);
  const double tol_gluing = reader.positive("tolerances", "gluing_residual", 1e-12);
  CaliberProblem problem = maxcal_problem_from_config(reader);
  reader.finish();
  problem = problem.completed();

  const MaxCalSolution solution = maxcal_solve(problem);
  const ExplicitPathMeasure oracle = brute_force_paths(problem, solution.multipliers);
  const ExplicitPathMeasure expanded = solution.measure.expand();
  const double tv = total_variation_paths(expanded, oracle);
  const double gluing = gluing_factorization_check(solution.measure);
  const std::size_t wins = count_caliber_wins(problem, solution, n_perturbations, seed);

  const ExplicitPathMeasure base = brute_force_paths(
      problem, std::vector<double>(problem.observables.size(), 0.0));
  const double solution_caliber = caliber(expanded, base);

  ExperimentResult result;
  result.experiment = "maxcal";
  result.checks.push_back(below("tv_vs_bruteforce", tv, tol_tv));
  result.checks.push_back(below("gluing_residual", gluing, tol_gluing));
  result.checks.push_back(at_least("caliber_wins", static_cast<double>(wins),
                                   static_cast<double>(n_perturbations)));

  json solution_json;
  solution_json["multipliers"] = solution.multipliers;
  solution_json["caliber"] = solution_caliber;
  solution_json["log_partition"] = solution.log_partition;
  solution_json["iterations"] = solution.iterations;
  solution_json["grad_norm"] = solution.grad_norm;
  const auto marginals = solution.measure.marginals();
  solution_json["marginals"] = marginals;
  result.artifacts.push_back({"solution.json", solution_json.dump(2) + "\n"});

  std::string csv = csv_header({"time", "state", "probability"});
  for (std::size_t t = 0; t < marginals.size(); ++t)
    for (std::size_t s = 0; s < marginals[t].size(); ++s)
      csv_append(csv, {static_cast<double>(t), static_cast<double>(s), marginals[t][s]});
  result.artifacts.push_back({"marginals.csv", std::move(csv)});
  return result;
}

}  // namespace

bool ExperimentResult::passed() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

json ExperimentResult::report_json() const {
  json checks_json = json::array();
  for (const auto& c : checks)
    checks_json.push_back(
        {{"name", c.name}, {"value", c.value}, {"tolerance", c.tolerance}, {"pass", c.pass}});
  return json{{"experiment", experiment},
              {"config", config_echo},
              {"checks", checks_json},
              {"seed", seed}};
}

std::string ExperimentResult::report_text() const {
  std::string out;
  for (const auto& c : checks) {
    out += c.pass ? "[PASS] " : "[FAIL] ";
    out += c.name + ": value=" + format_double(c.value) +
           " tolerance=" + format_double(c.tolerance) + "\n";
  }
  out += passed() ? "all checks passed\n" : "some checks FAILED\n";
  return out;
}

ExperimentResult run_experiment(const json& config) {
  require(config.is_object(), "config root must be a JSON object");
  const auto it = config.find("experiment");
  if (it == config.end() || !it->is_string())
    throw InvalidArgument("invalid config:\n  - experiment: required string field "
                          "(moments, functor, sewing, fk-backward, maxent, maxcal)");
  const std::string name = it->get<std::string>();

  ExperimentResult result;
  if (name == "moments")
    result = run_moments(config);
  else if (name == "functor")
    result = run_functor(config);
  else if (name == "sewing")
    result = run_sewing(config);
  else if (name == "fk-backward")
    result = run_fk_backward(config);
  else if (name == "maxent")
    result = run_maxent(config);
  else if (name == "maxcal")
    result = run_maxcal(config);
  else
    throw InvalidArgument("invalid config:\n  - experiment: unknown experiment \"" + name +
                          "\" (expected moments, functor, sewing, fk-backward, maxent, "
                          "maxcal)");

  result.config_echo = config;
  ConfigReader reader(config);
  result.seed = reader.count("numerics", "seed", kDefaultSeed);
  result.output_dir = reader.text("", "output_dir", "");
  result.artifacts.push_back({"report.json", result.report_json().dump(2) + "\n"});
  return result;
}

ExperimentResult run_experiment_text(const std::string& config_json) {
  json config;
  try {
    config = json::parse(config_json);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config is not valid JSON: ") + e.what());
  }
  return run_experiment(config);
}

}  // namespace fkflow
