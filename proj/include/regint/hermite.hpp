#pragma once

#include "regint/grid_fn.hpp"
#include "regint/orlicz.hpp"

#include <vector>

namespace regint {

/// Normalized Hermite function h_n(t), 0 ≤ n ≤ 1024.
double hermite_fn(int n, double t);

/// Rows 0..nmax of h_j evaluated at the points t.
Eigen::MatrixXd hermite_table(int nmax, const Eigen::VectorXd& t);

/// Applies d/dt to a Hermite coefficient vector: h_j' = √(j/2) h_{j−1} − √((j+1)/2) h_{j+1}.
/// The result has one more entry than the input.
Eigen::VectorXd hermite_coeff_derivative(const Eigen::VectorXd& c);

/// Gauss–Hermite rule for ∫ g(t) e^{−t²} dt.
struct GaussHermiteRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
  /// weights·e^{t²}: the rule for ∫ g(t) dt when g = h_n h_m-like.
  Eigen::VectorXd hweights;
};

GaussHermiteRule gauss_hermite(int order);

/// (∫ h_n h_m)_{n,m ≤ nmax} under the Gauss–Hermite rule.
Eigen::MatrixXd orthonormality_matrix(int nmax, int order);

/// Smooth step: 0 at t ≤ 0, 1 at t ≥ 1, all derivatives flat at both ends.
double smooth_step(double t);

/// Dyadic bump: a = 0 off (1/4, 4), a(1) = 1, a(t) + a(4t) = 1 on [1/4, 1].
struct BumpA {
  double operator()(double t) const;
};

struct BandKernel {
  int n = 0;
  BumpA a{};
  int quad_order = 200;

  int jmin() const;  // first contributing degree
  int jmax() const;  // last contributing degree
  /// a(j/4^n) for j = 0..jmax().
  Eigen::VectorXd weights() const;
};

/// H̄_n^a(x, y) = Σ_j a(j/4^n) h_j(x) h_j(y).
double band_kernel_eval(const BandKernel& bk, double x, double y);

/// ∂_x^alpha H̄_n^a(x_i, y_j) for all pairs.
Eigen::MatrixXd band_kernel_matrix(const BandKernel& bk, const Eigen::VectorXd& xs,
                                   const Eigen::VectorXd& ys, int alpha = 0);

/// Hermite coefficients ⟨f, h_j⟩, j ≤ jmax, by trapezoid quadrature on f's grid.
Eigen::VectorXd hermite_coefficients(const GridFunctiond& f, int jmax);

/// x ↦ ∂^alpha ∫ H̄_n^a(x, y) f(y) dy on f's grid.
GridFunctiond band_project(const BandKernel& bk, const GridFunctiond& f, Warnings* warnings = nullptr,
                           int alpha = 0);

/// J_0 f + Σ_{n=0..N} H̄_n^a ◇ f.
GridFunctiond reconstruct(const GridFunctiond& f, int N, Warnings* warnings = nullptr);

/// sup over [−6, 6] of |−h_α'' + x² h_α − (2α+1) h_α|.
double eigen_check(int alpha);

struct BandBoundsRow {
  int n = 0;
  double proj_e = 0;        // ‖∂_α H̄_n ◇ f‖_e
  double proj_sup = 0;      // ‖∂_α H̄_n ◇ f‖_∞
  double proj_deriv_e = 0;  // ‖H̄_n ◇ ∂_α f‖_e
  double scale_a = 0;       // 2^{n|α|} ‖f‖_e
  double scale_b = 0;       // 2^{n|α|} β_e(2^n) ‖f‖_{e_*}
  double scale_4 = 0;       // ‖f‖_{2m+|α|,2m,e} / 4^{nm}
  double scale_5 = 0;       // 2^{n(|α|+k)} β_e(2^n)
  double const_a = 0, const_b = 0, const_4 = 0;
};

BandBoundsRow band_operator_bounds(const BandKernel& bk, const GridFunctiond& f, int alpha, int m,
                                   int k, const YoungFunction& e);

struct BandBoundsSweep {
  std::vector<BandBoundsRow> rows;
  double spread_a = 0, spread_b = 0, spread_4 = 0;  // max/min of fitted constants
  double growth_a = 0, growth_b = 0, growth_4 = 0;  // max_n C(n) / C(n_min)
};

BandBoundsSweep band_operator_sweep(const GridFunctiond& f, int alpha, int m, int k,
                                    const YoungFunction& e, int nmin, int nmax);

struct KernelDecayReport {
  std::vector<int> bands;
  std::vector<double> sup_abs;    // sup |∂^α H̄_n|
  std::vector<double> decay_c;    // fitted C in |∂^α H̄_n| ≤ C 2^{n(α+1)} / (1+2^n|x−y|)^k
  double slope = 0;               // least-squares slope of log2 sup vs n
};

/// Sweeps (x, y) ∈ [−L, L]^2 on a points × points grid.
KernelDecayReport kernel_decay(int alpha, int k, const std::vector<int>& bands, double L = 2.0,
                               int points = 161);

}  // namespace regint
