#include <doctest.h>

#include <cmath>
#include <random>

#include "core/errors.hpp"
#include "core/param_flow.hpp"

using namespace fkflow;

TEST_CASE("ou moment flow is the identity at t = 0") {
  const OuParams params(1.0, 0.0, 1.0);
  const ParamPoint x = ou_moment_flow(params, ParamPoint(1.0, 0.5), 0.0);
  CHECK(x.mean() == 1.0);
  CHECK(x.variance() == 0.5);
}

TEST_CASE("ou mean decays along the closed form") {
  // Oracle: m(1) = e^{-1}, frozen from the analytic solution and
  // cross-checked against RK4 below.
  const OuParams params(1.0, 0.0, 1.0);
  const ParamPoint x = ou_moment_flow(params, ParamPoint(1.0, 0.0), 1.0);
  CHECK(x.mean() == doctest::Approx(0.36787944117144233).epsilon(1e-12));
}

TEST_CASE("ou closed form matches RK4 integration of the moment ODEs") {
  // Independent oracle: integrate (m, M2) with M2' = -2 b M2 + 2 b k m + 2 lambda
  // and compare s = M2 - m^2 against the closed form.
  const OuParams params(1.3, 0.7, 0.9);
  FlowSpec raw_moments;
  raw_moments.vector_field = [params](const ParamPoint& x, double) {
    const double m = x.coords[0];
    const double m2 = x.coords[1];
    return std::vector<double>{
        -params.mean_reversion * (m - params.stationary_mean),
        -2.0 * params.mean_reversion * m2 +
            2.0 * params.mean_reversion * params.stationary_mean * m +
            2.0 * params.noise_intensity};
  };
  const double m0 = 1.4;
  const double s0 = 0.8;
  const ParamPoint raw = integrate_flow(raw_moments, ParamPoint(m0, s0 + m0 * m0), 1.7, 1e-4);
  const ParamPoint closed = ou_moment_flow(params, ParamPoint(m0, s0), 1.7);
  CHECK(closed.mean() == doctest::Approx(raw.coords[0]).epsilon(1e-10));
  CHECK(closed.variance() ==
        doctest::Approx(raw.coords[1] - raw.coords[0] * raw.coords[0]).epsilon(1e-9));
}

TEST_CASE("ou flow reaches the stationary point (k, lambda/b)") {
  const OuParams params(2.0, 0.5, 1.0);
  const ParamPoint x = ou_moment_flow(params, ParamPoint(3.0, 4.0), 40.0);
  CHECK(std::abs(x.mean() - 0.5) < 1e-12);
  CHECK(std::abs(x.variance() - 0.5) < 1e-12);
}

TEST_CASE("ou convergence to the stationary point is monotone past 1/b") {
  const OuParams params(1.5, -0.3, 0.8);
  const ParamPoint x0(2.0, 3.0);
  double previous = 1e300;
  for (double t = 1.0 / params.mean_reversion; t < 8.0; t += 0.25) {
    const ParamPoint x = ou_moment_flow(params, x0, t);
    const double gap = std::max(std::abs(x.mean() - params.stationary_mean),
                                std::abs(x.variance() - params.stationary_variance()));
    CHECK(gap <= previous);
    previous = gap;
  }
}

TEST_CASE("wiener moments: identity at zero and linear growth") {
  const ParamPoint at_zero = wiener_moment_flow(0.0, 1.0, ParamPoint(0.0, 1.0), 0.0);
  CHECK(at_zero.mean() == 0.0);
  CHECK(at_zero.variance() == 1.0);

  // Ito isometry oracle: Var(sqrt(2 lambda) W_t) = 2 lambda t; Monte Carlo
  // check with plain normals, independent of the library sampler.
  const ParamPoint x = wiener_moment_flow(1.0, 1.0, ParamPoint(0.0, 0.0), 2.0);
  CHECK(x.mean() == doctest::Approx(-2.0));
  CHECK(x.variance() == doctest::Approx(4.0));
  std::mt19937 gen(7);
  std::normal_distribution<double> normal(0.0, std::sqrt(2.0));
  double sum = 0.0, sum2 = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double w = std::sqrt(2.0) * normal(gen);  // sqrt(2 lambda) W_2, lambda = 1
    sum += w;
    sum2 += w * w;
  }
  const double sample_var = sum2 / n - (sum / n) * (sum / n);
  CHECK(sample_var == doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("variance stays positive whenever noise acts") {
  const OuParams params(0.7, 0.0, 0.4);
  for (double s0 : {0.0, 1e-6, 1.0})
    for (double t : {1e-6, 0.1, 10.0}) {
      CHECK(ou_moment_flow(params, ParamPoint(1.0, s0), t).variance() > 0.0);
      CHECK(wiener_moment_flow(0.3, 0.5, ParamPoint(1.0, s0), t).variance() > 0.0);
    }
}

TEST_CASE("integrate_flow: zero field is the identity") {
  FlowSpec spec;
  spec.vector_field = [](const ParamPoint& x, double) {
    return std::vector<double>(x.dim(), 0.0);
  };
  const ParamPoint x = integrate_flow(spec, ParamPoint(2.0, 3.0), 5.0, 1e-2);
  CHECK(x.mean() == 2.0);
  CHECK(x.variance() == 3.0);
}

TEST_CASE("integrate_flow: linear field reproduces the exponential") {
  FlowSpec spec;
  spec.vector_field = [](const ParamPoint& x, double) {
    return std::vector<double>{x.coords[0]};
  };
  const ParamPoint x = integrate_flow(spec, ParamPoint(std::vector<double>{1.0}), 1.0, 1e-3);
  CHECK(std::abs(x.coords[0] - 2.718281828459045) < 1e-9);
}

TEST_CASE("integrate_flow matches the OU closed form within 1e-9") {
  const OuParams params(1.0, 0.0, 1.0);
  const FlowSpec spec = ou_flow(params);
  const ParamPoint numeric = integrate_flow(spec, ParamPoint(1.0, 1.0), 1.0, 1e-3);
  const ParamPoint closed = ou_moment_flow(params, ParamPoint(1.0, 1.0), 1.0);
  CHECK(std::abs(numeric.mean() - closed.mean()) < 1e-9);
  CHECK(std::abs(numeric.variance() - closed.variance()) < 1e-9);
}

TEST_CASE("RK4 convergence order is at least 3.8") {
  // Richardson slope over dt in {1e-2, 5e-3, 2.5e-3} against the closed form.
  const OuParams params(3.0, 0.2, 1.5);
  FlowSpec spec = ou_flow(params);
  spec.closed_form.reset();  // force integration
  const ParamPoint x0(2.0, 1.0);
  const ParamPoint truth = ou_moment_flow(params, x0, 1.0);
  std::vector<double> dts = {1e-2, 5e-3, 2.5e-3};
  std::vector<double> errs;
  for (double dt : dts) {
    const ParamPoint x = integrate_flow(spec, x0, 1.0, dt);
    errs.push_back(std::max(std::abs(x.mean() - truth.mean()),
                            std::abs(x.variance() - truth.variance())));
  }
  // Least-squares slope of log(err) vs log(dt).
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < dts.size(); ++i) {
    const double lx = std::log(dts[i]);
    const double ly = std::log(errs[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(dts.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(slope >= 3.8);
}

TEST_CASE("group law: trivial and closed-form residuals") {
  const OuParams params(1.0, 0.0, 1.0);
  const FlowSpec spec = ou_flow(params);
  CHECK(check_group_law(spec, ParamPoint(1.0, 1.0), 0.0, 0.0) == 0.0);
  CHECK(check_group_law(spec, ParamPoint(1.0, 1.0), 0.3, 0.7) < 1e-12);
}

TEST_CASE("group law: RK4 flow satisfies the law within its global error") {
  const OuParams params(1.0, 0.0, 1.0);
  FlowSpec spec = ou_flow(params);
  spec.closed_form.reset();
  CHECK(check_group_law(spec, ParamPoint(1.0, 1.0), 0.3, 0.7, 1e-3) < 1e-8);
}

TEST_CASE("group law holds on a randomized grid of points and times") {
  const OuParams params(0.8, -0.4, 1.2);
  const FlowSpec spec = ou_flow(params);
  std::mt19937 gen(42);
  std::uniform_real_distribution<double> mean_dist(-2.0, 2.0);
  std::uniform_real_distribution<double> var_dist(0.1, 3.0);
  std::uniform_real_distribution<double> time_dist(0.0, 2.0);
  for (int i = 0; i < 100; ++i) {
    const ParamPoint x0(mean_dist(gen), var_dist(gen));
    CHECK(check_group_law(spec, x0, time_dist(gen), time_dist(gen)) < 1e-12);
  }
}

TEST_CASE("group law rejects time-dependent vector fields") {
  FlowSpec spec;
  spec.vector_field = [](const ParamPoint& x, double t) {
    return std::vector<double>{t * x.coords[0], 0.0};
  };
  spec.time_homogeneous = false;
  CHECK_THROWS_AS(check_group_law(spec, ParamPoint(1.0, 1.0), 0.5, 0.5), InvalidArgument);
}

TEST_CASE("closed form agrees with vector-field integration for FlowSpecs") {
  // Property backing the FlowSpec invariant.
  const FlowSpec ou = ou_flow(OuParams(0.9, 0.3, 0.7));
  const FlowSpec wiener = wiener_flow(0.5, 0.8);
  std::mt19937 gen(11);
  std::uniform_real_distribution<double> mean_dist(-1.0, 1.0);
  std::uniform_real_distribution<double> var_dist(0.2, 2.0);
  std::uniform_real_distribution<double> time_dist(0.0, 1.5);
  for (int i = 0; i < 20; ++i) {
    const ParamPoint x0(mean_dist(gen), var_dist(gen));
    const double t = time_dist(gen);
    for (const FlowSpec* spec : {&ou, &wiener}) {
      const ParamPoint a = (*spec->closed_form)(x0, t);
      const ParamPoint b = integrate_flow(*spec, x0, t, 1e-3);
      CHECK(std::abs(a.mean() - b.mean()) < 1e-8);
      CHECK(std::abs(a.variance() - b.variance()) < 1e-8);
    }
  }
}

TEST_CASE("input validation") {
  const OuParams params(1.0, 0.0, 1.0);
  CHECK_THROWS_AS(ou_moment_flow(params, ParamPoint(1.0, 0.5), -1.0), InvalidArgument);
  CHECK_THROWS_AS(ou_moment_flow(params, ParamPoint(std::nan(""), 0.5), 1.0),
                  InvalidArgument);
  CHECK_THROWS_AS(ou_moment_flow(params, ParamPoint(0.0, -0.5), 1.0), InvalidArgument);
  CHECK_THROWS_AS(OuParams(-1.0, 0.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(OuParams(1.0, 0.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(wiener_moment_flow(0.0, -1.0, ParamPoint(0.0, 1.0), 1.0), InvalidArgument);

  FlowSpec spec = ou_flow(params);
  CHECK_THROWS_AS(integrate_flow(spec, ParamPoint(1.0, 1.0), 1.0, 0.0), InvalidArgument);
  // Step-count overflow.
  CHECK_THROWS_AS(integrate_flow(spec, ParamPoint(1.0, 1.0), 1e12, 1e-3), InvalidArgument);
}

TEST_CASE("NaN mid-integration is reported with the failure time") {
  FlowSpec spec;
  spec.vector_field = [](const ParamPoint& x, double) {
    // Blows up in finite time: x' = x^2 from x0 = 1 diverges at t = 1.
    return std::vector<double>{x.coords[0] * x.coords[0]};
  };
  try {
    integrate_flow(spec, ParamPoint(std::vector<double>{1.0}), 2.0, 1e-3);
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("t = ") != std::string::npos);
  }
}
