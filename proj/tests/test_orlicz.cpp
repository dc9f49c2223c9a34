#include "regint/orlicz.hpp"
#include "regint/superkernel.hpp"

#include <doctest.h>

#include <cmath>

using namespace regint;

namespace {

GridFunctiond indicator01(double scale, int n = 3001) {
  return GridFunctiond::sample(-0.5, 1.5, n, [&](double x) { return (x >= 0 && x <= 1) ? scale : 0.0; });
}

double gauss(double x) { return std::exp(-x * x / 2) / std::sqrt(2 * M_PI); }

}  // namespace

TEST_CASE("young_inverse") {
  CHECK(young_inverse(e_p(2), 4) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(young_inverse(e_log(), 2 * std::log(2.0)) - 1.0) <= 1e-8);
  CHECK(young_inverse(e_p(3), 0) == 0.0);
  CHECK(young_inverse(e_log(), 0) == 0.0);
}

TEST_CASE("beta") {
  CHECK(beta(e_p(2), 16) == doctest::Approx(4.0).epsilon(1e-10));
  CHECK(beta(e_p(3), 8) == doctest::Approx(std::pow(8.0, 2.0 / 3.0)).epsilon(1e-10));
}

TEST_CASE("Young functions: convexity, evenness, doubling") {
  for (const auto& e : {e_p(1.5), e_p(2), e_p(4), e_log()}) {
    CHECK(e(0) == 0.0);
    for (double s = 0.05; s < 50; s *= 1.37) {
      CHECK(e(-s) == e(s));
      CHECK(e(2 * s) <= e.doubling * e(s) * (1 + 1e-12));
      const double a = s, b = 3 * s + 1;
      CHECK(e(0.3 * a + 0.7 * b) <= 0.3 * e(a) + 0.7 * e(b) + 1e-12);
    }
  }
}

TEST_CASE("conjugates") {
  // (|s|^2)_* = s^2/4
  const auto c2 = conjugate(e_p(2));
  CHECK(c2(3) == doctest::Approx(2.25));
  // Fenchel–Young inequality for e_log.
  const auto el = e_log();
  const auto cl = conjugate(el);
  for (double s : {0.5, 1.0, 3.0, 10.0})
    for (double t : {0.2, 1.0, 4.0}) CHECK(s * t <= el(t) + cl(s) + 1e-8);
}

TEST_CASE("class tags") {
  const auto t2 = class_tag(e_p(2));
  CHECK(t2.alpha == doctest::Approx(0.5));
  CHECK(t2.gamma == 0.0);
  const auto tl = class_tag(e_log());
  CHECK(tl.alpha == 0.0);
  CHECK(tl.gamma == 1.0);
}

TEST_CASE("luxembourg norm of indicators") {
  const auto one = indicator01(1.0);
  for (double p : {1.5, 2.0, 3.0}) CHECK(std::abs(luxembourg_norm(one, e_p(p)) - 1.0) <= 2 * one.spacing());
  CHECK(std::abs(luxembourg_norm(indicator01(3.0), e_p(2)) - 3.0) <= 6 * one.spacing());
  // 1/c solves (1+s)ln(1+s) = 1
  double lo = 0, hi = 5;
  for (int i = 0; i < 200; ++i) {
    const double s = 0.5 * (lo + hi);
    ((1 + s) * std::log(1 + s) < 1 ? lo : hi) = s;
  }
  const double expect = 1 / lo;
  CHECK(expect == doctest::Approx(1.31).epsilon(0.01));
  CHECK(std::abs(luxembourg_norm(one, e_log()) - expect) <= 0.01);
}

TEST_CASE("luxembourg norm is homogeneous and matches L^p") {
  const auto g = GridFunctiond::sample(-8, 8, 1601, gauss);
  for (double p : {1.5, 2.0, 3.0}) {
    CHECK(luxembourg_norm(g, e_p(p)) == doctest::Approx(lp_norm(g, p)).epsilon(1e-6));
    const auto g3 = g.with_values(-2.5 * g.values());
    CHECK(luxembourg_norm(g3, e_p(p)) == doctest::Approx(2.5 * luxembourg_norm(g, e_p(p))).epsilon(1e-6));
  }
}

TEST_CASE("weighted Sobolev-Orlicz norm against Gaussian moments") {
  const auto g = GridFunctiond::sample(-12, 12, 4001, gauss);
  CHECK(sobolev_orlicz_norm(g, 0, 0, e_p(2)) == doctest::Approx(lp_norm(g, 2)).epsilon(1e-9));
  // ‖x^j γ‖_2^2 = ∫ x^{2j} e^{−x²} dx / 2π = Γ(j+1/2) / 2π
  double expect = 0;
  for (int j = 0; j <= 2; ++j) expect += std::sqrt(std::tgamma(j + 0.5) / (2 * M_PI));
  CHECK(std::abs(sobolev_orlicz_norm(g, 0, 2, e_p(2)) - expect) <= 1e-6);
}

TEST_CASE("norm_1plus") {
  const auto small = GridFunctiond::sample(-2, 2, 801, [](double x) { return std::abs(x) <= 1 ? 0.5 * (1 - x * x) : 0.0; });
  CHECK(norm_1plus(small, 0, 0) == doctest::Approx(integrate(small.with_values(small.values().cwiseAbs()))).epsilon(1e-12));

  const double h = std::exp(2.0);
  const auto spike = GridFunctiond::sample(-0.5, 1.0, 30001, [&](double x) { return (x >= 0 && x <= 1 / h) ? h : 0.0; });
  CHECK(std::abs(norm_1plus(spike, 0, 0) - 3.0) <= 3 * h * spike.spacing());
}

TEST_CASE("e_log norm is dominated by the 1+ norm") {
  const double h = std::exp(2.0);
  std::vector<GridFunctiond> fs = {
      GridFunctiond::sample(-8, 8, 3201, gauss),
      GridFunctiond::sample(-0.5, 1.0, 30001, [&](double x) { return (x >= 0 && x <= 1 / h) ? h : 0.0; }),
      GridFunctiond::sample(-6, 6, 2401, [](double x) { return 0.5 * std::exp(-std::abs(x)); }),
      indicator01(5.0),
  };
  for (const auto& f : fs) {
    const double lux = luxembourg_norm(f, e_log());
    CHECK(lux <= 2 * std::max(1.0, norm_1plus(f, 0, 0)));
    CHECK(integrate(f.with_values(f.values().cwiseAbs())) <= c_star() * lux * (1 + 1e-9));
  }
}

TEST_CASE("eps_star and c_star") {
  const double t = eps_star();
  CHECK(std::abs(t - 2 * std::log(1 + t)) <= 1e-10);
  CHECK(t == doctest::Approx(2.51286).epsilon(1e-5));
  CHECK(c_star() == doctest::Approx(2 + 1 / std::log(1 + t)).epsilon(1e-12));
  CHECK(c_star() == doctest::Approx(2.79591).epsilon(1e-5));
}

TEST_CASE("holder_orlicz") {
  const auto one = indicator01(1.0);
  const auto h = holder_orlicz(one, one, e_p(2));
  CHECK(h.lhs == doctest::Approx(1.0).epsilon(2 * one.spacing()));
  // 2‖f‖_2 ‖g‖_{e_*} with e_*(s) = s²/4 gives ‖f‖_2‖g‖_2.
  CHECK(h.rhs == doctest::Approx(1.0).epsilon(4 * one.spacing()));
  CHECK(h.lhs <= h.rhs * (1 + 1e-6));

  const auto zero = one.with_values(Eigen::VectorXd::Zero(one.size()));
  const auto hz = holder_orlicz(one, zero, e_p(2));
  CHECK(hz.lhs == 0.0);
  CHECK(hz.rhs == 0.0);

  const auto f = GridFunctiond::sample(-6, 6, 1201, [](double x) { return std::exp(-x * x) * (1 + x); });
  const auto g = GridFunctiond::sample(-6, 6, 1201, [](double x) { return 1 / (1 + x * x); });
  for (const auto& e : {e_p(1.5), e_p(3), e_log()}) {
    const auto r = holder_orlicz(f, g, e);
    CHECK(r.lhs <= r.rhs * (1 + 1e-6));
  }
}

TEST_CASE("Young convolution inequality") {
  const auto f = GridFunctiond::sample(-10, 10, 2001, [](double x) { return std::exp(-std::abs(x)) * (2 + std::sin(3 * x)); });
  const auto rho = GridFunctiond::sample(-10, 10, 2001, [](double x) { return std::abs(x) < 1 ? 1 - std::abs(x) : 0.0; });
  const double r1 = integrate(rho);
  const auto c = convolve(rho, f);
  for (const auto& e : {e_p(2), e_log()}) CHECK(luxembourg_norm(c, e) <= r1 * luxembourg_norm(f, e) * (1 + 1e-6) + 1e-9);
}

TEST_CASE("rho_np norms scale with the band") {
  for (const auto& e : {e_p(2), e_log()}) {
    std::vector<double> ratios;
    for (int n = 0; n <= 6; ++n) {
      const auto r = rho_np(n, 2, -40, 40, 40001);
      ratios.push_back(luxembourg_norm(r, e) / (std::pow(2.0, -n) * beta(e, std::pow(2.0, n))));
    }
    const auto [mn, mx] = std::minmax_element(ratios.begin(), ratios.end());
    CHECK(*mx / *mn <= 4.0);
  }
}

TEST_CASE("weight u_l lies in both builtin spaces") {
  const auto u = GridFunctiond::sample(-200, 200, 40001, [](double x) { return std::pow(1 + std::abs(x), -2.0); });
  const double l1 = integrate(u);
  for (const auto& e : {e_p(2), e_log()}) CHECK(luxembourg_norm(u, e) <= std::max(e(1) * l1, 1.0));
}

TEST_CASE("mollification does not inflate the weighted norm beyond 4^m") {
  const auto f = GridFunctiond::sample(-8, 8, 1601, [](double x) { return std::exp(-std::abs(x)) / 2; });
  const int m = 1, q = 0;
  const auto g = smooth(f, mollifier_kernel(), 0.4);
  const double base = sobolev_orlicz_norm(g, 2 * m + q, 2 * m, e_p(2));
  for (double d : {0.2, 0.1}) {
    const double after = sobolev_orlicz_norm(smooth(g, mollifier_kernel(), d), 2 * m + q, 2 * m, e_p(2));
    CHECK(after <= std::pow(2.0, 2 * m) * base * (1 + 1e-3));
  }
}

TEST_CASE("multi_indices") {
  CHECK(multi_indices(1, 3).size() == 4);
  CHECK(multi_indices(2, 2).size() == 6);
}
