#include "regint/pdmp.hpp"
#include "regint/stats.hpp"

#include <doctest.h>

#include <cmath>

using namespace regint;

namespace {

const PdmpModel& model() {
  static const PdmpModel m = default_pdmp_model();
  return m;
}

PdmpModel constant_gamma(double v) {
  PdmpModel m = default_pdmp_model();
  m.gamma = [v](double, double) { return v; };
  return m;
}

PdmpModel no_jumps() {
  PdmpModel m = default_pdmp_model();
  m.c = [](double, double) { return 0.0; };
  m.dc_dz = m.dc_dx = [](double, double) { return 0.0; };
  return m;
}

}  // namespace

TEST_CASE("mollified indicator") {
  for (int M : {1, 3, 6}) {
    for (double z = -M - 2.0; z <= M + 2.0; z += 0.01) {
      const double v = mollified_indicator(M, z);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      if (std::abs(z) <= M - 1) CHECK(v == 1.0);
      if (std::abs(z) >= M + 1) CHECK(v == 0.0);
    }
    // Symmetric bump: Φ_M(±M) = 1/2.
    CHECK(mollified_indicator(M, double(M)) == doctest::Approx(0.5).epsilon(1e-9));
  }
  CHECK(z_star(4) == 7.0);
}

TEST_CASE("flow: closed form against RK4") {
  const auto& m = model();
  for (double x : {-3.0, -0.2, 0.0, 1.5})
    for (double s : {0.0, 0.3, 2.0}) {
      CHECK(std::abs(flow(m, x, s, 1e-3) - flow_rk4(m.g, x, s, 1e-3)) <= 1e-10);
      // sinh Ψ_s(x) = e^{−s} sinh x
      CHECK(std::sinh(flow(m, x, s, 1e-3)) == doctest::Approx(std::exp(-s) * std::sinh(x)).epsilon(1e-12));
    }
  CHECK_THROWS_AS(flow_rk4(m.g, 0.5, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("hypotheses of the default model") {
  const auto rep = validate_hypotheses(model(), 4);
  CHECK(rep.get("a1").pass);
  CHECK(rep.get("a2").pass);
  CHECK(rep.get("h1").pass);
  // ∂_z c vanishes at z = ±1/√r, so the lower bound on |∂_z c| cannot hold there.
  const auto& h2 = rep.get("h2");
  CHECK_FALSE(h2.pass);
  CHECK(std::abs(std::abs(h2.z) - 1 / std::sqrt(6.0)) <= 0.05);
  CHECK_FALSE(rep.all_pass);
  CHECK_THROWS_AS(rep.get("h9"), std::out_of_range);
}

TEST_CASE("hypothesis violations are detected") {
  PdmpModel neg = default_pdmp_model();
  neg.gamma = [](double z, double x) { return -(1.0 + 0.5 * std::sin(x) * std::exp(-z * z)); };
  CHECK_FALSE(validate_hypotheses(neg, 4).get("a1").pass);

  PdmpModel big = default_pdmp_model();
  const auto c = big.c, dz = big.dc_dz, dx = big.dc_dx;
  big.c = [c](double z, double x) { return 1e3 * c(z, x); };
  big.dc_dz = [dz](double z, double x) { return 1e3 * dz(z, x); };
  big.dc_dx = [dx](double z, double x) { return 1e3 * dx(z, x); };
  CHECK_FALSE(validate_hypotheses(big, 4).get("a2").pass);
}

TEST_CASE("lambda_M and theta") {
  CHECK(lambda_M(model(), 4) == 30.0);
  CHECK(lambda_M(model(), 0) == 4 * model().gamma_hi);
  CHECK_THROWS_AS(lambda_M(model(), -1), std::invalid_argument);

  CHECK(theta(constant_gamma(1.5), 3, 0.2) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(theta(constant_gamma(0.5), 3, 0.2) == doctest::Approx(1 - 0.5 / 3.0).epsilon(1e-13));
  CHECK(theta(model(), 4, 0.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
  // γ(z, 1) = 1 + ½ sin(1) e^{−z²}: θ = 2/3 − sin(1) √π erf(5) / 60.
  const double expect = 2.0 / 3.0 - std::sin(1.0) * std::sqrt(M_PI) * std::erf(5.0) / 60;
  CHECK(expect == doctest::Approx(0.641809).epsilon(1e-6));
  CHECK(theta(model(), 4, 1.0) == doctest::Approx(expect).epsilon(1e-10));
  CHECK_THROWS_AS(theta(model(), 0, 0.0), std::invalid_argument);
}

TEST_CASE("q_M is a probability density") {
  for (int M : {1, 4})
    for (double x : {-1.0, 0.0, 1.0}) {
      const double L = M + 5.0;
      const auto q = GridFunctiond::sample(-L, L, 40001, [&](double z) { return q_M_density(model(), M, x, z); });
      CHECK(q.values().minCoeff() >= 0.0);
      CHECK(integrate(q) == doctest::Approx(1.0).epsilon(1e-4));
    }
}

TEST_CASE("sample_qM bump frequency is theta") {
  const int M = 2, n = 40000;
  const double x = 1.0;
  std::mt19937_64 g(12);
  int bumps = 0;
  for (int i = 0; i < n; ++i) {
    const auto d = sample_qM(model(), M, x, g);
    if (d.bump) {
      ++bumps;
      CHECK(std::abs(d.z - z_star(M)) <= 1.0);
    } else {
      CHECK(std::abs(d.z) < M + 1.0);
    }
  }
  const double th = theta(model(), M, x);
  CHECK(std::abs(double(bumps) / n - th) <= 3 * std::sqrt(th * (1 - th) / n));
  CHECK(sample_qM(model(), M, x, std::uint64_t(5)) == sample_qM(model(), M, x, std::uint64_t(5)));
}

TEST_CASE("without jumps both representations follow the flow") {
  const auto m = no_jumps();
  const double x0 = 1.2, t = 0.8;
  const auto a = simulate_indicator(m, 3, x0, t, 50, 4);
  const auto b = simulate_smooth(m, 3, x0, t, 50, 4);
  const double exact = std::asinh(std::sinh(x0) * std::exp(-t));
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i] == doctest::Approx(exact).epsilon(1e-12));
    CHECK(b[i] == doctest::Approx(exact).epsilon(1e-12));
  }
}

TEST_CASE("jump counts are Poisson(lambda_M t)") {
  const int M = 2, n = 4000;
  const double t = 0.5;
  std::vector<int> ki, ks;
  simulate_indicator(model(), M, 0.3, t, n, 8, 0, &ki);
  simulate_smooth(model(), M, 0.3, t, n, 8, 0, &ks);
  const double lam = lambda_M(model(), M) * t;
  for (const auto* k : {&ki, &ks}) {
    const std::vector<double> v(k->begin(), k->end());
    const auto ms = mean_se(v);
    CHECK(std::abs(ms.mean - lam) <= 4 * std::sqrt(lam / n));
  }
}

TEST_CASE("indicator and smooth representations share a law") {
  const int M = 2, n = 6000;
  const auto a = simulate_indicator(model(), M, 0.3, 1.0, n, 31);
  const auto b = simulate_smooth(model(), M, 0.3, 1.0, n, 32);
  const auto ks = ks_two_sample(a, b);
  CHECK(ks.statistic <= ks.critical_1pct);
}

TEST_CASE("simulation does not depend on the worker count") {
  CHECK(simulate_smooth(model(), 2, 0.1, 1.0, 300, 9, 1) == simulate_smooth(model(), 2, 0.1, 1.0, 300, 9, 3));
  CHECK(simulate_indicator(model(), 2, 0.1, 1.0, 300, 9, 1) == simulate_indicator(model(), 2, 0.1, 1.0, 300, 9, 3));
  const auto c1 = simulate_coupled(model(), {1, 3}, 0.1, 1.0, 200, 9, 1);
  const auto c3 = simulate_coupled(model(), {1, 3}, 0.1, 1.0, 200, 9, 3);
  CHECK(c1.x == c3.x);
  CHECK(c1.delta == c3.delta);
}

TEST_CASE("coupled run argument checks") {
  const auto c = simulate_coupled(model(), {2}, 0.1, 1.0, 100, 13);
  REQUIRE(c.x.size() == 1);
  for (double v : c.x[0]) CHECK(std::isfinite(v));
  CHECK_THROWS_AS(simulate_coupled(model(), {}, 0.1, 1.0, 10, 1), std::invalid_argument);
}

TEST_CASE("u_M") {
  // r = 2: ∫_z^∞ (1+s²)^{−2} ds = π/4 − F(z), F(z) = z/(2(1+z²)) + atan(z)/2.
  const PdmpModel m = default_pdmp_model(2.0, 1.0);
  auto F = [](double z) { return z / (2 * (1 + z * z)) + std::atan(z) / 2; };
  for (int M : {1, 2, 4, 8}) {
    const double z = M - 1.0;
    CHECK(u_M(m, M) == doctest::Approx(m.gamma_lo * 2 * (M_PI / 4 - F(z))).epsilon(1e-9));
  }
  double prev = INFINITY;
  for (int M = 1; M <= 10; ++M) {
    const double u = u_M(model(), M);
    CHECK(u < prev);
    prev = u;
  }
}

TEST_CASE("density_pM") {
  CHECK_THROWS_AS(density_pM(model(), 4, 0.0, -2, 2, 100, 1.0, 50, 3), resolution_error);
  const auto d = density_pM(model(), 1, 0.0, -5, 5, 251, 1.0, 400, 3);
  CHECK(d.sigma == doctest::Approx(std::sqrt(u_M(model(), 1))));
  CHECK(d.mass == doctest::Approx(1.0).epsilon(1e-3));
  // ∂_x of a probability density integrates to zero.
  CHECK(std::abs(integrate(d.dx)) <= 1e-6);
}

TEST_CASE("rate_a14 arguments and a constant test function") {
  const auto one = [](double) { return 1.0; };
  const auto r = rate_a14(model(), one, {1, 2, 3}, 12, 1.0, 0.2, 200, 5);
  for (double e : r.error) CHECK(e == 0.0);
  CHECK(r.pass);
  CHECK(r.predicted == -5.0);
  CHECK_THROWS_AS(rate_a14(model(), one, {1, 2, 3}, 8, 1.0, 0.2, 200, 5), std::invalid_argument);
  CHECK_THROWS_AS(rate_a14(model(), one, {1, 2}, 12, 1.0, 0.2, 200, 5), std::invalid_argument);
}

TEST_CASE("density rate preconditions") {
  // q = 1 needs 1 + 2(2 + 1/2) < r.
  CHECK_THROWS_AS(density_rate_mpmain(model(), 1, 2.0, 1.0, {1, 2, 3}, 8, 1.0, 50, 1), std::invalid_argument);
  CHECK_THROWS_AS(density_rate_mpmain(model(), 0, 2.0, 1.0, {1, 2}, 8, 1.0, 50, 1), std::invalid_argument);
}

TEST_CASE("Gaussian integration by parts") {
  const auto r = gauss_ibp_check(20000, 3);
  REQUIRE(r.cases.size() == 3);
  for (const auto& c : r.cases) CHECK(c.pass);
  CHECK(r.ordering_ok);
  CHECK(r.theta_norm <= r.weight_norm);
  CHECK(r.pass);
  CHECK_THROWS_AS(gauss_ibp_check(10, 3), std::invalid_argument);
}
