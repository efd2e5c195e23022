#include "fkflow/fkflow.h"

#include <cstring>
#include <memory>
#include <string>

#include "core/errors.hpp"
#include "core/experiment.hpp"
#include "core/kernel.hpp"
#include "core/manifold.hpp"
#include "core/mc.hpp"
#include "core/param_flow.hpp"

using namespace fkflow;

struct fk_density {
  GridDensity density;
};

struct fk_sde {
  SdeSpec sde;
};

struct fk_kernel {
  TransitionKernel kernel;
};

struct fk_result {
  ExperimentResult result;
  std::string report;
  std::string summary;
};

namespace {

thread_local std::string g_last_error;

template <class Fn>
fk_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return FK_OK;
  } catch (const InvalidArgument& e) {
    g_last_error = e.what();
    return FK_ERR_INVALID_ARGUMENT;
  } catch (const InfeasibleError& e) {
    g_last_error = e.what();
    return FK_ERR_INFEASIBLE;
  } catch (const NumericError& e) {
    g_last_error = e.what();
    return FK_ERR_NUMERIC;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return FK_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return FK_ERR_INTERNAL;
  }
}

void check_out(const void* p, const char* what) {
  require(p != nullptr, std::string(what) + " pointer must not be null");
}

}  // namespace

extern "C" {

const char* fk_version(void) { return "fkflow 1.0.0"; }

const char* fk_last_error(void) { return g_last_error.c_str(); }

fk_status fk_ou_moment_flow(double b, double k, double lambda, double m0, double s0,
                            double t, double* mean_out, double* variance_out) {
  return guarded([&] {
    check_out(mean_out, "mean_out");
    check_out(variance_out, "variance_out");
    const ParamPoint x = ou_moment_flow(OuParams(b, k, lambda), ParamPoint(m0, s0), t);
    *mean_out = x.mean();
    *variance_out = x.variance();
  });
}

fk_status fk_wiener_moment_flow(double b, double lambda, double m0, double s0, double t,
                                double* mean_out, double* variance_out) {
  return guarded([&] {
    check_out(mean_out, "mean_out");
    check_out(variance_out, "variance_out");
    const ParamPoint x = wiener_moment_flow(b, lambda, ParamPoint(m0, s0), t);
    *mean_out = x.mean();
    *variance_out = x.variance();
  });
}

fk_status fk_ou_group_law_residual(double b, double k, double lambda, double m0, double s0,
                                   double t, double s, double* residual_out) {
  return guarded([&] {
    check_out(residual_out, "residual_out");
    *residual_out = check_group_law(ou_flow(OuParams(b, k, lambda)), ParamPoint(m0, s0), t, s);
  });
}

fk_status fk_density_gaussian(double mean, double variance, double dx, fk_density** out) {
  return guarded([&] {
    check_out(out, "out");
    const Grid base = gaussian_grid(mean, variance);
    const Grid grid = dx > 0.0 ? Grid::with_spacing(base.lo, base.hi, dx) : base;
    *out = new fk_density{density_from_params(ParamPoint(mean, variance)).discretize(grid)};
  });
}

fk_status fk_density_size(const fk_density* density, size_t* n_out) {
  return guarded([&] {
    check_out(density, "density");
    check_out(n_out, "n_out");
    *n_out = density->density.grid().n;
  });
}

fk_status fk_density_point(const fk_density* density, size_t i, double* q_out, double* p_out) {
  return guarded([&] {
    check_out(density, "density");
    check_out(q_out, "q_out");
    check_out(p_out, "p_out");
    require(i < density->density.grid().n, "grid index out of range");
    *q_out = density->density.grid().point(i);
    *p_out = density->density.values()[i];
  });
}

fk_status fk_density_entropy(const fk_density* density, double* entropy_out) {
  return guarded([&] {
    check_out(density, "density");
    check_out(entropy_out, "entropy_out");
    *entropy_out = entropy(density->density);
  });
}

fk_status fk_density_mean(const fk_density* density, double* mean_out) {
  return guarded([&] {
    check_out(density, "density");
    check_out(mean_out, "mean_out");
    *mean_out = density->density.mean();
  });
}

fk_status fk_density_variance(const fk_density* density, double* variance_out) {
  return guarded([&] {
    check_out(density, "density");
    check_out(variance_out, "variance_out");
    *variance_out = density->density.variance();
  });
}

void fk_density_free(fk_density* density) { delete density; }

fk_status fk_sde_ou(double b, double k, double lambda, fk_sde** out) {
  return guarded([&] {
    check_out(out, "out");
    *out = new fk_sde{ou_sde(OuParams(b, k, lambda))};
  });
}

fk_status fk_sde_wiener(double b, double lambda, fk_sde** out) {
  return guarded([&] {
    check_out(out, "out");
    *out = new fk_sde{wiener_sde(b, lambda)};
  });
}

void fk_sde_free(fk_sde* sde) { delete sde; }

fk_status fk_sample_terminal(const fk_sde* sde, double q0, double t_start, double t_end,
                             double dt, size_t n_paths, unsigned long long seed,
                             double* out_values) {
  return guarded([&] {
    check_out(sde, "sde");
    check_out(out_values, "out_values");
    const PathEnsemble ensemble =
        euler_maruyama(sde->sde, q0, t_start, t_end, dt, n_paths, seed, {t_end});
    const std::size_t last = ensemble.times.size() - 1;
    for (std::size_t p = 0; p < n_paths; ++p) out_values[p] = ensemble.state(p, last);
  });
}

fk_status fk_feynman_kac(const fk_sde* sde, fk_scalar_fn terminal, void* ctx, double q,
                         double t, double t_end, double dt, size_t n_paths,
                         unsigned long long seed, double* value_out, double* std_error_out) {
  return guarded([&] {
    check_out(sde, "sde");
    check_out(value_out, "value_out");
    check_out(std_error_out, "std_error_out");
    require(terminal != nullptr, "terminal function must not be null");
    const FkEstimate e = fk_estimate(
        sde->sde, [terminal, ctx](double y) { return terminal(y, ctx); }, q, t, t_end, dt,
        n_paths, seed);
    *value_out = e.value;
    *std_error_out = e.std_error;
  });
}

fk_status fk_kernel_exact_ou(double b, double k, double lambda, double lo, double hi,
                             size_t n_cells, double step, fk_kernel** out) {
  return guarded([&] {
    check_out(out, "out");
    *out = new fk_kernel{exact_ou_kernel(OuParams(b, k, lambda),
                                         CellGrid::from_range(lo, hi, n_cells), step)};
  });
}

fk_status fk_kernel_estimate(const fk_sde* sde, double lo, double hi, size_t n_cells,
                             double t0, double t1, double dt, size_t n_per_cell,
                             unsigned long long seed, fk_kernel** out) {
  return guarded([&] {
    check_out(sde, "sde");
    check_out(out, "out");
    *out = new fk_kernel{estimate_kernel(sde->sde, CellGrid::from_range(lo, hi, n_cells), t0,
                                         t1, dt, n_per_cell, seed)};
  });
}

fk_status fk_kernel_size(const fk_kernel* kernel, size_t* n_out) {
  return guarded([&] {
    check_out(kernel, "kernel");
    check_out(n_out, "n_out");
    *n_out = kernel->kernel.size();
  });
}

fk_status fk_kernel_entry(const fk_kernel* kernel, size_t i, size_t j, double* value_out) {
  return guarded([&] {
    check_out(kernel, "kernel");
    check_out(value_out, "value_out");
    require(i < kernel->kernel.size() && j < kernel->kernel.size(),
            "kernel index out of range");
    *value_out = kernel->kernel(i, j);
  });
}

fk_status fk_kernel_sewing_residual(const fk_kernel* k1, const fk_kernel* k2,
                                    const fk_kernel* k12, double* residual_out) {
  return guarded([&] {
    check_out(k1, "k1");
    check_out(k2, "k2");
    check_out(k12, "k12");
    check_out(residual_out, "residual_out");
    *residual_out = sewing_check(k1->kernel, k2->kernel, k12->kernel);
  });
}

void fk_kernel_free(fk_kernel* kernel) { delete kernel; }

fk_status fk_experiment_run(const char* config_json, const fk_run_options* options,
                            fk_result** out) {
  return guarded([&] {
    check_out(out, "out");
    require(config_json != nullptr, "config_json must not be null");
    nlohmann::json config;
    try {
      config = nlohmann::json::parse(config_json);
    } catch (const nlohmann::json::exception& e) {
      throw InvalidArgument(std::string("config is not valid JSON: ") + e.what());
    }
    if (options && options->has_seed) {
      if (!config.contains("numerics") || !config["numerics"].is_object())
        config["numerics"] = nlohmann::json::object();
      config["numerics"]["seed"] = options->seed;
    }
    auto result = std::make_unique<fk_result>();
    result->result = run_experiment(config);
    result->report = result->result.report_json().dump(2) + "\n";
    result->summary = result->result.report_text();
    *out = result.release();
  });
}

fk_status fk_result_report(const fk_result* result, const char** report_json_out) {
  return guarded([&] {
    check_out(result, "result");
    check_out(report_json_out, "report_json_out");
    *report_json_out = result->report.c_str();
  });
}

fk_status fk_result_summary(const fk_result* result, const char** text_out) {
  return guarded([&] {
    check_out(result, "result");
    check_out(text_out, "text_out");
    *text_out = result->summary.c_str();
  });
}

fk_status fk_result_passed(const fk_result* result, int* passed_out) {
  return guarded([&] {
    check_out(result, "result");
    check_out(passed_out, "passed_out");
    *passed_out = result->result.passed() ? 1 : 0;
  });
}

fk_status fk_result_output_dir(const fk_result* result, const char** dir_out) {
  return guarded([&] {
    check_out(result, "result");
    check_out(dir_out, "dir_out");
    *dir_out = result->result.output_dir.c_str();
  });
}

fk_status fk_result_artifact_count(const fk_result* result, size_t* count_out) {
  return guarded([&] {
    check_out(result, "result");
    check_out(count_out, "count_out");
    *count_out = result->result.artifacts.size();
  });
}

fk_status fk_result_artifact(const fk_result* result, size_t index, const char** name_out,
                             const char** content_out) {
  return guarded([&] {
    check_out(result, "result");
    check_out(name_out, "name_out");
    check_out(content_out, "content_out");
    require(index < result->result.artifacts.size(), "artifact index out of range");
    *name_out = result->result.artifacts[index].name.c_str();
    *content_out = result->result.artifacts[index].content.c_str();
  });
}

void fk_result_free(fk_result* result) { delete result; }

}  // extern "C"
