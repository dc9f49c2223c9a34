#include "regint/orlicz.hpp"
#include "regint/sde.hpp"
#include "regint/stats.hpp"

#include <doctest.h>

#include <cmath>

using namespace regint;

namespace {

std::vector<double> dyadic(int lo, int hi) {
  std::vector<double> d;
  for (int j = lo; j <= hi; ++j) d.push_back(std::ldexp(1.0, -j));
  return d;
}

double normal_quantile(double u) {
  double lo = -10, hi = 10;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    (0.5 * std::erfc(-mid / std::sqrt(2.0)) < u ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double variance(const std::vector<double>& v) {
  const double m = mean_se(v).mean;
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return s / double(v.size() - 1);
}

}  // namespace

TEST_CASE("Brownian endpoint law") {
  const int n = 20000;
  const auto run = simulate_pathdep(constant_model(1.0, 0.0), 1.0, 1.0 / 64, n, 17);
  const auto ms = mean_se(run.x_T);
  CHECK(std::abs(ms.mean) <= 3 * ms.se);
  // var of the sample variance of N(0,1) is 2/(n−1)
  CHECK(std::abs(variance(run.x_T) - 1.0) <= 3 * std::sqrt(2.0 / (n - 1)));
}

TEST_CASE("constant drift shifts the mean by cT") {
  const double c = 0.7, T = 2.0;
  const auto run = simulate_pathdep(constant_model(1.0, c), T, 1.0 / 32, 20000, 23);
  const auto ms = mean_se(run.x_T);
  CHECK(std::abs(ms.mean - c * T) <= 3 * ms.se);
}

TEST_CASE("paths do not depend on the worker count") {
  const auto model = logholder_model(0.5);
  const auto a = simulate_pathdep(model, 1.0, 1.0 / 256, 400, 99, 1);
  const auto b = simulate_pathdep(model, 1.0, 1.0 / 256, 400, 99, 3);
  CHECK(a.x_T == b.x_T);
  REQUIRE(a.snapshots.size() == b.snapshots.size());
  for (size_t i = 0; i < a.snapshots.size(); ++i) CHECK(a.snapshots[i].x_before == b.snapshots[i].x_before);
}

TEST_CASE("log-Hölder model stays elliptic") {
  const auto model = logholder_model(0.5);
  const auto run = simulate_pathdep(model, 1.0, 1.0 / 256, 500, 5);
  CHECK(run.ellipticity_ok);
  CHECK(run.sigma2_min >= 1.0);
  CHECK(run.sigma2_max <= 1.3 * 1.3 + 1e-12);
}

TEST_CASE("argument and coefficient validation") {
  CHECK_THROWS_AS(simulate_pathdep(constant_model(), 1.0, 0.3, 10, 1), std::invalid_argument);
  SdeModel bad = constant_model();
  bad.sigma = [](const PathState& s) { return s.t > 0.5 ? std::nan("") : 1.0; };
  CHECK_THROWS_AS(simulate_pathdep(bad, 1.0, 1.0 / 16, 10, 1), std::domain_error);
}

TEST_CASE("snapshots cover T and the dyadic range") {
  const double dt = 1.0 / 1024;
  const auto run = simulate_pathdep(constant_model(), 1.0, dt, 50, 3);
  CHECK_NOTHROW(run.snapshot(1.0));
  for (double d : dyadic(1, 6)) CHECK_NOTHROW(run.snapshot(d));
  CHECK_THROWS_AS(run.snapshot(std::ldexp(1.0, -8)), std::out_of_range);  // 2^-8 < 10 dt
  // σ ≡ 1, b ≡ 0: X_T^δ is X_T itself.
  const auto xd = run.x_delta(0.125);
  for (size_t i = 0; i < xd.size(); ++i) CHECK(xd[i] == doctest::Approx(run.x_T[i]).epsilon(1e-12));
}

TEST_CASE("one-step Gaussian density") {
  const auto run = simulate_pathdep(constant_model(1.0, 0.0), 1.0, 1.0 / 64, 2000, 8);
  const auto os = one_step_gaussian(run, 0.25);
  CHECK(integrate(os.density) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(os.density.values().minCoeff() >= 0.0);

  // δ = T: every path starts from x0, so p_T is N(x0, σ²T).
  const auto full = one_step_gaussian(simulate_pathdep(constant_model(1.5, 0.0), 1.0, 1.0 / 16, 50, 2), 1.0);
  double err = 0;
  for (int i = 0; i < full.density.n(); ++i) {
    const double y = full.density.x(i);
    err = std::max(err, std::abs(full.density[i] - std::exp(-y * y / (2 * 2.25)) / std::sqrt(2 * M_PI * 2.25)));
  }
  CHECK(err <= 1e-3);
}

TEST_CASE("Ito6 with constant coefficients") {
  const auto run = simulate_pathdep(constant_model(1.0, 0.5), 1.0, 1.0 / 1024, 500, 4);
  const auto rep = verify_ito6(run, dyadic(4, 6), 0.5);
  for (size_t i = 0; i < rep.deltas.size(); ++i) CHECK(rep.e_abs[i] == doctest::Approx(0.5 * rep.deltas[i]).epsilon(1e-9));
  CHECK(rep.bounded);
  CHECK(rep.pass);
}

TEST_CASE("Ito8 slopes") {
  const auto ds = dyadic(4, 8);
  // One path: p_δ is a single Gaussian of variance δ, whose 2m-th derivatives scale as δ^{−m}.
  const auto single = simulate_pathdep(constant_model(1.0, 0.0), 1.0, 1.0 / 4096, 1, 6);
  const auto r1 = verify_ito8(single, ds, 1);
  CHECK(std::abs(r1.slope - 1.0) <= 0.2);
  // Stratified quantiles of N(0, 1 − δ) spread by N(0, δ) give N(0, 1) for every δ.
  SdeRun smooth;
  smooth.T = 1;
  smooth.dt = 1.0 / 4096;
  smooth.n = 40000;  // tail quantiles must be denser than √δ_min
  for (double d : ds) {
    SdeSnapshot s;
    s.delta = d;
    for (int i = 0; i < smooth.n; ++i) {
      s.x_before.push_back(std::sqrt(1 - d) * normal_quantile((i + 0.5) / smooth.n));
      s.sigma_before.push_back(1.0);
      s.dw.push_back(0.0);
    }
    smooth.snapshots.push_back(std::move(s));
  }
  smooth.x_T = smooth.snapshots.front().x_before;
  const auto r0 = verify_ito8(smooth, ds, 1);
  CHECK(std::abs(r0.slope) <= 0.05);
  const auto g = GridFunctiond::sample(-12, 12, 4801, [](double x) { return std::exp(-x * x / 2) / std::sqrt(2 * M_PI); });
  CHECK(r0.norms.front() == doctest::Approx(norm_1plus(g, 2, 2)).epsilon(1e-3));
}
