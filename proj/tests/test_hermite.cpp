#include "regint/hermite.hpp"

#include <doctest.h>

#include <cmath>

using namespace regint;

namespace {

GridFunctiond hermite_grid(int j, double L = 14, int n = 2801) {
  return GridFunctiond::sample(-L, L, n, [&](double x) { return hermite_fn(j, x); });
}

double max_abs_diff(const GridFunctiond& a, const GridFunctiond& b) {
  return (a.values() - b.values()).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("hermite values") {
  CHECK(hermite_fn(0, 0) == doctest::Approx(std::pow(M_PI, -0.25)).epsilon(1e-14));
  CHECK(hermite_fn(0, 0) == doctest::Approx(0.7511255).epsilon(1e-7));
  CHECK(hermite_fn(1, 0) == 0.0);
  // h_1(t) = √2 t h_0(t)
  CHECK(hermite_fn(1, 0.7) == doctest::Approx(std::sqrt(2.0) * 0.7 * hermite_fn(0, 0.7)).epsilon(1e-14));
  CHECK(std::isfinite(hermite_fn(1024, 3.0)));
}

TEST_CASE("orthonormality up to degree 40") {
  const auto G = orthonormality_matrix(40, 200);
  CHECK((G - Eigen::MatrixXd::Identity(41, 41)).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("eigenfunction residuals") {
  CHECK(eigen_check(0) <= 1e-8);
  CHECK(eigen_check(1) <= 1e-5);
  CHECK(eigen_check(10) <= 1e-5);
  CHECK(eigen_check(30) <= 1e-5);
}

TEST_CASE("dyadic bump partitions unity") {
  const BumpA a;
  CHECK(a(1.0) == 1.0);
  CHECK(a(0.25) == 0.0);
  CHECK(a(4.0) == 0.0);
  CHECK(a(0.1) == 0.0);
  for (double t = 0.25; t <= 1.0; t += 0.01) CHECK(std::abs(a(t) + a(4 * t) - 1.0) <= 1e-14);
  // Over the integer degrees each j gets total weight 1 across bands.
  for (int j = 1; j <= 200; ++j) {
    double s = 0;
    for (int n = 0; n <= 5; ++n) s += a(j / std::pow(4.0, n));
    CHECK(std::abs(s - 1.0) <= 1e-14);
  }
}

TEST_CASE("band kernel: support and symmetry") {
  BandKernel b0{0};
  CHECK(b0.jmin() == 1);
  CHECK(b0.jmax() == 3);
  const BumpA a;
  const double x = 0.4, y = -1.1;
  double manual = 0;
  for (int j = 1; j <= 3; ++j) manual += a(j) * hermite_fn(j, x) * hermite_fn(j, y);
  CHECK(band_kernel_eval(b0, x, y) == doctest::Approx(manual).epsilon(1e-13));
  BandKernel b2{2};
  CHECK(band_kernel_eval(b2, x, y) == band_kernel_eval(b2, y, x));
}

TEST_CASE("band projection picks single Hermite functions") {
  BandKernel b2{2};  // weight a(16/16) = 1 at j = 16
  const auto h16 = hermite_grid(16);
  CHECK(max_abs_diff(band_project(b2, h16), h16) <= 1e-8);
  const auto h2 = hermite_grid(2);  // outside (4, 64)
  CHECK(band_project(b2, h2).values().cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("reconstruction") {
  const auto h0 = hermite_grid(0);
  CHECK(max_abs_diff(reconstruct(h0, 3), h0) <= 1e-12);
  const auto h5 = hermite_grid(5);
  CHECK(max_abs_diff(reconstruct(h5, 2), h5) <= 1e-8);

  const auto g = GridFunctiond::sample(-10, 10, 2001, [](double x) {
    return std::exp(-(x - 0.3) * (x - 0.3) / 2) / std::sqrt(2 * M_PI);
  });
  CHECK(lp_norm(g.with_values(g.values() - reconstruct(g, 4).values()), 2) <= 1e-3);
}

TEST_CASE("reconstruction error decreases with N") {
  // σ = 2 is not a multiple of h_0, so every band carries energy.
  const auto g = GridFunctiond::sample(-24, 24, 4801, [](double x) { return std::exp(-x * x / 8) / std::sqrt(8 * M_PI); });
  double prev = 1e9;
  for (int N = 0; N <= 3; ++N) {
    const double err = lp_norm(g.with_values(g.values() - reconstruct(g, N).values()), 2);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev <= 1e-3);
}

TEST_CASE("band energies of a wide Gaussian decay") {
  const auto g = GridFunctiond::sample(-24, 24, 4801, [](double x) { return std::exp(-x * x / 8) / std::sqrt(8 * M_PI); });
  double prev = 1e9;
  for (int n = 1; n <= 4; ++n) {
    const double e = lp_norm(band_project(BandKernel{n}, g), 2);
    CHECK(e < prev);
    prev = e;
  }
}

TEST_CASE("coefficient derivative matches the recurrence") {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(4);
  c[2] = 1;
  const auto d = hermite_coeff_derivative(c);
  REQUIRE(d.size() == 5);
  const double t = 0.37, h = 1e-5;
  double v = 0;
  for (int j = 0; j < 5; ++j) v += d[j] * hermite_fn(j, t);
  CHECK(v == doctest::Approx((hermite_fn(2, t + h) - hermite_fn(2, t - h)) / (2 * h)).epsilon(1e-8));
}

TEST_CASE("kernel decay slopes track |alpha| + 1") {
  for (int alpha : {0, 1}) {
    const auto rep = kernel_decay(alpha, 3, {2, 3, 4});
    CHECK(std::abs(rep.slope - (alpha + 1)) <= 0.15 * (alpha + 1));
  }
}

TEST_CASE("band operator bounds of the zero function vanish") {
  const auto z = GridFunctiond::sample(-8, 8, 801, [](double) { return 0.0; });
  const auto r = band_operator_bounds(BandKernel{1}, z, 0, 1, 1, e_p(2));
  CHECK(r.proj_e == 0.0);
  CHECK(r.proj_sup == 0.0);
  CHECK(r.proj_deriv_e == 0.0);
}
