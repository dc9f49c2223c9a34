#include "regint/interp.hpp"

#include <doctest.h>

#include <cmath>

using namespace regint;

namespace {

GridFunctiond gauss_grid(double lo = -10, double hi = 10, int n = 801) {
  return GridFunctiond::sample(lo, hi, n, [](double x) { return std::exp(-x * x / 2) / std::sqrt(2 * M_PI); });
}

InterpParams params(int q, int k, int m, YoungFunction e, int N) {
  InterpParams p;
  p.q = q;
  p.k = k;
  p.m = m;
  p.e = std::move(e);
  p.N = N;
  return p;
}

ApproxFamily constant_family(const GridFunctiond& f, int N) {
  ApproxFamily fam;
  for (int n = 0; n <= N; ++n) {
    fam.index.push_back(n);
    fam.densities.push_back(f);
  }
  return fam;
}

}  // namespace

TEST_CASE("s_eta") {
  CHECK(s_eta(0, 1, 1, 2.0, 2.0) == doctest::Approx(0.625).epsilon(1e-14));
  const double big = 1e3;
  const double c = 0 + 1 + 0.5;
  CHECK(s_eta(0, 1, 1, 2.0, big) > 0.99 * std::min(1.0, (2 * big - c) / (2 * big)));
  Warnings w;
  const double low = s_eta(0, 1, 1, 2.0, 0.5, &w);
  CHECK(low <= 0.0);
  CHECK(low == doctest::Approx((2 * 0.5 - c) / (2 * 0.5)));
  CHECK_FALSE(w.empty());
  CHECK_THROWS_AS(s_eta(0, 1, 1, 1.0, 2.0), std::invalid_argument);
}

TEST_CASE("theta window") {
  const auto [lo, hi] = theta_window(params(0, 1, 1, e_p(2), 5));
  CHECK(lo == doctest::Approx(0.75));
  CHECK(hi == doctest::Approx(2.0));
  const auto [lo2, hi2] = theta_window(params(1, 1, 2, e_log(), 5));
  CHECK(lo2 == doctest::Approx(2.0 / 3.0));
  CHECK(hi2 == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("pi functional of an already smooth family") {
  const auto f = gauss_grid();
  const int N = 3, m = 1;
  const auto p = params(0, 1, m, e_p(2), N);
  const auto r = pi_functional(GridDensity{f}, constant_family(f, N), p);
  CHECK(r.dist_sum == 0.0);
  double geo = 0;
  for (int n = 0; n <= N; ++n) geo += std::pow(2.0, -2.0 * n * m);
  const double norm = sobolev_orlicz_norm(f, 2 * m, 2 * m, e_p(2));
  CHECK(r.norm_sum == doctest::Approx(norm * geo).epsilon(1e-12));

  const auto r0 = pi_functional(GridDensity{f}, constant_family(f, 0), params(0, 1, m, e_p(2), 0));
  CHECK(r0.dk.size() == 1);
  CHECK(r0.norm_sum == doctest::Approx(norm).epsilon(1e-12));
  CHECK(r0.tail_ok);
}

TEST_CASE("pi functional with a super-kernel family converges") {
  const auto f = gauss_grid(-10, 10, 1201);
  const auto p = params(0, 1, 1, e_p(2), 4);
  const auto fam = super_kernel_family(f, 1.0, p.N);
  const auto r = pi_functional(GridDensity{f}, fam, p);
  CHECK(std::isfinite(r.value));
  CHECK(r.value > 0);
  for (int n = 1; n <= p.N; ++n) CHECK(r.norm_terms[size_t(n)] < r.norm_terms[size_t(n - 1)]);
  CHECK(r.tail_ok);
}

TEST_CASE("key inequality ratio") {
  const auto z = GridFunctiond::sample(-10, 10, 801, [](double) { return 0.0; });
  const auto p = params(0, 1, 1, e_p(2), 3);
  CHECK_THROWS_AS(key_inequality_ratio(z, constant_family(z, 3), p), std::invalid_argument);

  const auto f = gauss_grid(-10, 10, 1201);
  const auto kr = key_inequality_ratio(f, super_kernel_family(f, 1.0, 3), p);
  CHECK(kr.ratio > 0);
  CHECK(kr.ratio < 10);
}

TEST_CASE("criterion verdicts") {
  const std::vector<double> ds = {0.25, 0.125, 0.0625, 0.03125, 0.015625};
  std::vector<double> flat(ds.size(), 2.0), dk, blow;
  for (double d : ds) {
    dk.push_back(d * d * d);
    blow.push_back(std::pow(d, -4.0));
  }
  const auto p = params(0, 1, 1, e_p(2), 5);  // threshold (0+1+1/2)/2 = 0.75

  const auto ok = criterion_check(ds, flat, dk, p, 1.0, 0.0);
  CHECK(ok.pass);
  CHECK(ok.branch == "i2");

  const auto below = criterion_check(ds, flat, dk, p, 0.5, 0.0);
  CHECK_FALSE(below.pass);
  CHECK(below.branch == "none");

  const auto kap = criterion_check(ds, flat, dk, p, 0.5, 2.0);
  CHECK(kap.i3);
  CHECK(kap.pass);

  const auto unb = criterion_check(ds, blow, dk, p, 1.0, 0.0);
  CHECK_FALSE(unb.bounded);
  CHECK_FALSE(unb.pass);

  std::vector<double> rising = {5, 4, 3, 2, 1};  // grows with δ
  CHECK_THROWS_AS(criterion_check(ds, rising, dk, p, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(criterion_check({0.1, 0.05}, {1, 1}, {1, 1}, p, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("conv_rate_check with f_n = f") {
  const auto f = gauss_grid(-10, 10, 801);
  const auto p = params(0, 1, 1, e_p(2), 5);
  const double alpha = 2.0;
  const double base = std::pow(sobolev_orlicz_norm(f, 2, 2, e_p(2)), alpha);
  std::vector<GridFunctiond> fn(4, f);
  std::vector<double> eta;
  for (int n = 0; n < 4; ++n) eta.push_back(base * std::ldexp(1.0, n));
  const auto r = conv_rate_check(f, fn, eta, alpha, p);
  CHECK(std::isinf(r.theta_meas));
  CHECK(r.pass);
  CHECK_THROWS_AS(conv_rate_check(f, fn, eta, 1.0, p), std::invalid_argument);
  std::vector<double> tiny = {1, 1, 1, 1};
  CHECK_THROWS_AS(conv_rate_check(f, fn, tiny, alpha, p), std::runtime_error);
}

TEST_CASE("K functional") {
  const auto f = gauss_grid(-10, 10, 801);
  const auto zero = f.with_values(Eigen::VectorXd::Zero(f.size()));
  const auto p = params(0, 1, 1, e_p(2), 3);
  ApproxFamily fam = super_kernel_family(f, 1.0, 3);
  fam.index.push_back(-1);
  fam.densities.push_back(zero);
  const auto K = k_functional(GridDensity{f}, fam, p);
  CHECK(K(0.0) == doctest::Approx(*std::min_element(K.dk.begin(), K.dk.end())));
  CHECK(K(1e12) == doctest::Approx(K.dk.back()));
  CHECK(K.xnorm.back() == 0.0);
  // Non-decreasing and concave in t.
  double prev = K(0.0);
  for (double t = 0.01; t < 100; t *= 3) {
    CHECK(K(t) >= prev);
    prev = K(t);
    CHECK(K(2 * t) <= 2 * K(t) + 1e-15);
  }
  CHECK(k_discrete_sum(K, 0.2, 1, 0) == doctest::Approx(K(1.0)));
  CHECK_THROWS_AS(k_integral(K, 0.2, 1.5), std::invalid_argument);
  CHECK(k_integral(K, 0.2, 1e-4) > 0);
}

TEST_CASE("Besov estimate") {
  CHECK_THROWS_AS(besov_estimate(gauss_grid(), 2.0, {}), std::invalid_argument);
  const std::vector<double> ds = {0.2, 0.1, 0.05, 0.025};
  CHECK_THROWS_AS(besov_estimate(gauss_grid(-8, 8, 801), 2.0, ds), std::domain_error);
  const auto g = gauss_grid(-8, 8, 25601);
  CHECK(besov_estimate(g, 2.0, ds).estimate >= 0.9);
  // f' of the triangle is a pair of unit jumps: s = 1/p.
  const auto step = GridFunctiond::sample(-3, 3, 9601, [](double x) { return std::abs(x) < 1 ? (x < 0 ? 1.0 : -1.0) : 0.0; });
  for (double p : {2.0, 3.0}) CHECK(std::abs(besov_estimate(step, p, ds).estimate - 1 / p) <= 0.15);
}

TEST_CASE("standard test family integrates to one") {
  const auto fam = standard_test_family();
  CHECK(fam.size() == 10);
  for (const auto& d : fam) CHECK(integrate(GridFunctiond::sample(-30, 30, 12001, d.pdf)) == doctest::Approx(1.0).epsilon(1e-6));
}
