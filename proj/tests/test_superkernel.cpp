#include "regint/superkernel.hpp"

#include <doctest.h>

#include <cmath>

using namespace regint;

namespace {

const SuperKernel& kernel() {
  static const SuperKernel k = build_superkernel();
  return k;
}

GridFunctiond gauss_grid(double lo, double hi, int n) {
  return GridFunctiond::sample(lo, hi, n, [](double x) { return std::exp(-x * x / 2) / std::sqrt(2 * M_PI); });
}

std::vector<double> dyadic(int lo, int hi) {
  std::vector<double> d;
  for (int j = lo; j <= hi; ++j) d.push_back(std::ldexp(1.0, -j));
  return d;
}

RoughDensity named(const std::string& name) {
  for (const auto& r : rough_test_family())
    if (r.name == name) return r;
  throw std::logic_error("no density " + name);
}

GridFunctiond sample(const RoughDensity& rd, double h) {
  return GridFunctiond::sample(rd.lo, rd.hi, int((rd.hi - rd.lo) / h) + 1, rd.pdf);
}

}  // namespace

TEST_CASE("super kernel moments") {
  const auto mom = kernel_moments(kernel().phi, 8);
  CHECK(std::abs(mom[0] - 1.0) <= 1e-8);
  CHECK(std::abs(mom[1]) <= 1e-12);
  CHECK(std::abs(mom[2]) <= 1e-6);
  for (int j = 3; j <= 8; ++j) CHECK(std::abs(mom[size_t(j)]) <= 1e-6);
  CHECK(kernel().tail_max <= 1e-9);
  // Even kernel.
  CHECK(kernel().eval(0.37) == doctest::Approx(kernel().eval(-0.37)).epsilon(1e-12));
}

TEST_CASE("super kernel closed form agrees with quadrature") {
  for (int m : {0, 1, 2})
    for (double x : {0.0, 0.5, 2.0})
      CHECK(std::abs(kernel().deriv(m, x) - superkernel_quadrature(SpectralProfile::gamma_tail, m, x)) <= 1e-8);
}

TEST_CASE("spectral multiplier") {
  CHECK(spectral_multiplier(SpectralProfile::gamma_tail, 0) == 1.0);
  CHECK(spectral_multiplier(SpectralProfile::compact, 0.5) == 1.0);
  CHECK(spectral_multiplier(SpectralProfile::compact, 2.5) == 0.0);
}

TEST_CASE("mollifier") {
  const auto psi = build_mollifier();
  CHECK(psi[0] == 0.0);
  CHECK(psi[psi.n() - 1] == 0.0);
  CHECK(psi.values().minCoeff() >= 0.0);
  CHECK(std::abs(integrate(psi) - 1.0) <= 1e-10);
}

TEST_CASE("smoothing approximates the identity and is linear") {
  const auto f = gauss_grid(-10, 10, 4001);
  const double h = f.spacing();
  const auto fd = smooth(f, kernel_of(kernel()), 4 * h);
  CHECK(lp_norm(f.with_values(fd.values() - f.values()), 2) <= 1e-3);

  for (double d : {0.05, 0.025}) {
    const auto s = smooth(f, kernel_of(kernel()), d);
    CHECK(std::abs(lp_norm(s, 2) - lp_norm(f, 2)) <= 1e-4);
  }

  const auto g = GridFunctiond::sample(-10, 10, 4001, [](double x) { return std::exp(-std::abs(x)); });
  const auto lhs = smooth(f.with_values(2 * f.values() - 3 * g.values()), mollifier_kernel(), 0.2);
  const Eigen::VectorXd rhs = 2 * smooth(f, mollifier_kernel(), 0.2).values() - 3 * smooth(g, mollifier_kernel(), 0.2).values();
  CHECK((lhs.values() - rhs).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("smoothing derivatives match finite differences of the values") {
  const auto f = GridFunctiond::sample(-6, 6, 1201, [](double x) { return 0.5 * std::exp(-std::abs(x)); });
  for (double d : {0.4, 0.1}) {
    const auto s = smooth(f, mollifier_kernel(), d);
    const auto plain = f.with_values(s.values());
    for (int m : {1, 2}) {
      const auto cb = derivative(s, {m, 0});
      const auto fd = derivative(plain, {m, 0});
      CHECK((cb.values() - fd.values()).cwiseAbs().maxCoeff() <= 2e-2 * fd.values().cwiseAbs().maxCoeff());
    }
  }
}

TEST_CASE("super kernel preserves polynomials; the mollifier does not") {
  const auto f = GridFunctiond::sample(-30, 30, 6001, [](double x) { return 1 - 0.5 * x + 0.2 * x * x - 0.01 * std::pow(x, 5) + 1e-4 * std::pow(x, 8); });
  const double delta = 0.5;
  const auto s = smooth(f, kernel_of(kernel()), delta);
  const auto m = smooth(f, mollifier_kernel(), delta);
  double err_s = 0, err_m = 0, scale = 0;
  for (int i = 0; i < f.n(); ++i) {
    if (std::abs(f.x(i)) > 5) continue;
    err_s = std::max(err_s, std::abs(s[i] - f[i]));
    err_m = std::max(err_m, std::abs(m[i] - f[i]));
    scale = std::max(scale, std::abs(f[i]));
  }
  CHECK(err_s <= 1e-5 * scale);
  CHECK(err_m >= 1e-3);
}

TEST_CASE("kk2 and kk3 on a Gaussian") {
  // Eight vanishing moments push d_1 below the LP floor for δ < 1/8, so stay at coarse δ.
  const std::vector<double> ds = {1.0, 0.7, 0.5, 0.35, 0.25};
  const auto f = gauss_grid(-12, 12, 2401);
  const auto r2 = rate_kk2(f, 2, 1, 0, e_p(2), ds);
  CHECK(r2.slope >= 2.55);
  const auto r3 = rate_kk3(f, 1, 3, 0, e_p(2), dyadic(2, 6));
  CHECK(std::abs(r3.slope) <= 0.1);
}

TEST_CASE("kk2 and kk3 on the triangle density") {
  // d_k(μ_f, μ_{f_δ}) ~ δ^{q+k+1} for a single kink, and ‖f_δ‖_{3,2} ~ δ^{−3/2}.
  const auto ds = dyadic(2, 6);
  const auto f = sample(named("triangle"), ds.back() / 12);
  const auto r2 = rate_kk2(f, 1, 1, 0, e_p(2), ds);
  CHECK(r2.slope >= 0.85 * 2);
  CHECK(std::abs(r2.slope - 3.0) <= 0.15);
  const auto r3 = rate_kk3(f, 1, 3, 0, e_p(2), ds);
  CHECK(r3.slope <= 1.15 * 2);
  CHECK(std::abs(r3.slope - 1.5) <= 0.1);
}

TEST_CASE("kk3 with n = q does not blow up") {
  const auto ds = dyadic(2, 6);
  const auto f = sample(named("laplace"), ds.back() / 12);
  CHECK(std::abs(rate_kk3(f, 1, 1, 0, e_p(2), ds).slope) <= 0.1);
}

TEST_CASE("rate fits reject degenerate inputs") {
  const auto f = gauss_grid(-8, 8, 801);
  CHECK_THROWS_AS(rate_kk2(f, 1, 1, 0, e_p(2), {0.1}), std::invalid_argument);
  CHECK_THROWS_AS(rate_kk3(f, 1, 3, 0, e_p(2), {0.1, 0.05}), std::invalid_argument);
  CHECK_THROWS_AS(rate_kk3(f, 2, 1, 0, e_p(2), dyadic(2, 4)), std::invalid_argument);
}
