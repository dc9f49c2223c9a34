#include "regint/grid_fn.hpp"

#include <doctest.h>

#include <cmath>

using namespace regint;

namespace {

double gauss(double x, double s) { return std::exp(-x * x / (2 * s * s)) / (s * std::sqrt(2 * M_PI)); }

}  // namespace

TEST_CASE("grid: spacing and validation") {
  const auto f = GridFunctiond::sample(-1.0, 2.0, 31, [](double x) { return x; });
  CHECK(f.spacing() == (2.0 - -1.0) / 30.0);
  CHECK_THROWS_AS(GridFunctiond(0.0, 1.0, 7, Eigen::VectorXd::Zero(7)), std::invalid_argument);
  Eigen::VectorXd bad = Eigen::VectorXd::Zero(10);
  bad[3] = std::nan("");
  CHECK_THROWS_AS(GridFunctiond(0.0, 1.0, 10, bad), std::domain_error);
}

TEST_CASE("integrate: constants, odd functions, Gaussian") {
  CHECK(integrate(GridFunctiond::sample(0, 1, 11, [](double) { return 1.0; })) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(integrate(GridFunctiond::sample(-1, 1, 101, [](double x) { return x; }))) <= 1e-12);
  const auto g = GridFunctiond::sample(-8, 8, 2001, [](double x) { return gauss(x, 1); });
  CHECK(std::abs(integrate(g) - std::erf(8 / std::sqrt(2.0))) <= 1e-8);
}

TEST_CASE("integrate is linear") {
  const auto f = GridFunctiond::sample(-3, 3, 301, [](double x) { return std::sin(x) + 2; });
  const auto g = GridFunctiond::sample(-3, 3, 301, [](double x) { return x * x; });
  const double a = 2.5, b = -1.25;
  const auto h = f.with_values(a * f.values() + b * g.values());
  CHECK(std::abs(integrate(h) - a * integrate(f) - b * integrate(g)) <= 1e-12 * (std::abs(a) + std::abs(b)) * 20);
}

TEST_CASE("derivative: stencils and callbacks") {
  const auto sq = GridFunctiond::sample(-2, 2, 401, [](double x) { return x * x; });
  const auto d2 = derivative(sq, {2, 0});
  CHECK((d2.values().array() - 2.0).abs().maxCoeff() <= 1e-6);

  const auto s = GridFunctiond::sample(-3, 3, 1200, [](double x) { return std::sin(x); });
  const auto ds = derivative(s, {1, 0});
  double err = 0;
  for (int i = 0; i < ds.n(); ++i) err = std::max(err, std::abs(ds[i] - std::cos(ds.x(i))));
  CHECK(err <= 1e-6);

  const auto same = derivative(s, {0, 0});
  CHECK(same.values() == s.values());

  CHECK_THROWS_AS(derivative(s, {5, 0}), order_too_high);
}

TEST_CASE("derivative of a weighted function follows the product rule") {
  const auto f = GridFunctiond::sample(0.5, 3, 501, [](double x) { return std::exp(-x); });
  const auto wf = weight_multiply(f, 2.0);
  const auto lhs = derivative(wf, {1, 0});
  double err = 0;
  for (int i = 10; i < f.n() - 10; ++i) {
    const double x = f.x(i);
    const double rhs = (1 + x) * (1 + x) * -std::exp(-x) + 2 * (1 + x) * std::exp(-x);
    err = std::max(err, std::abs(lhs[i] - rhs));
  }
  CHECK(err <= 1e-7);
}

TEST_CASE("convolve: Gaussian semigroup, identity, zero, symmetry") {
  const double s1 = 0.6, s2 = 0.8;
  const auto f = GridFunctiond::sample(-10, 10, 1601, [&](double x) { return gauss(x, s1); });
  const auto g = GridFunctiond::sample(-10, 10, 1601, [&](double x) { return gauss(x, s2); });
  const auto c = convolve(f, g);
  double err = 0;
  for (int i = 0; i < c.n(); ++i) err = std::max(err, std::abs(c[i] - gauss(c.x(i), std::hypot(s1, s2))));
  CHECK(err <= 1e-6);

  const auto cg = convolve(g, f);
  CHECK((c.values() - cg.values()).cwiseAbs().maxCoeff() <= 1e-10);

  const auto zero = f.with_values(Eigen::VectorXd::Zero(f.size()));
  CHECK(convolve(f, zero).values().cwiseAbs().maxCoeff() == 0.0);

  const double h = f.spacing();
  const auto tri = GridFunctiond::sample(-10, 10, 1601, [](double x) { return std::exp(-x * x); });
  const auto narrow = GridFunctiond::sample(-10, 10, 1601, [&](double x) { return gauss(x, h); });
  const auto near = convolve(tri, narrow);
  CHECK((near.values() - tri.values()).cwiseAbs().maxCoeff() <= 1e-3);
}

TEST_CASE("convolve warns when the kernel does not decay") {
  const auto f = GridFunctiond::sample(-1, 1, 101, [](double x) { return 1 - x * x; });
  const auto flat = GridFunctiond::sample(-1, 1, 101, [](double) { return 1.0; });
  Warnings w;
  convolve(f, flat, &w);
  CHECK_FALSE(w.empty());
}

TEST_CASE("weight_multiply") {
  const auto f = GridFunctiond::sample(-2, 2, 41, [](double x) { return std::cos(x); });
  CHECK(weight_multiply(f, 0.0).values() == f.values());
  const auto one = GridFunctiond::sample(0, 1, 11, [](double) { return 1.0; });
  CHECK(weight_multiply(one, 2.0)[10] == doctest::Approx(4.0));
  const double l = 3;
  const auto u = GridFunctiond::sample(-5, 5, 101, [&](double x) { return std::pow(1 + std::abs(x), -l); });
  CHECK((weight_multiply(u, l).values().array() - 1.0).abs().maxCoeff() <= 1e-14);
}

TEST_CASE("CSV and JSON round trips") {
  const auto f = GridFunctiond::sample(-1, 1, 17, [](double x) { return std::exp(x); });
  const auto c = from_csv(to_csv(f));
  CHECK(c.same_grid(f));
  CHECK((c.values() - f.values()).cwiseAbs().maxCoeff() == 0.0);
  const auto j = from_json(to_json(f));
  CHECK(j.same_grid(f));
  CHECK((j.values() - f.values()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("two-dimensional grids integrate separably") {
  const auto f = GridFunctiond::sample2({-6, -6}, {6, 6}, {241, 241}, [](double x, double y) {
    return gauss(x, 1) * gauss(y, 1);
  });
  CHECK(f.dim() == 2);
  CHECK(integrate(f) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("measure representations") {
  const Samples s = empirical({0.0, 1.0, 2.0, 3.0});
  CHECK(total_mass(s) == doctest::Approx(1.0));
  GaussMix bad{{{1.0, 0.0, -1.0}}};
  CHECK_THROWS(check_measure(bad, true));
}
