#pragma once

#include "regint/grid_fn.hpp"
#include "regint/orlicz.hpp"

#include <functional>
#include <string>
#include <vector>

namespace regint {

/// Radial spectral multiplier χ with χ(0) = 1 and χ^{(j)}(0) = 0 for 1 ≤ j ≤ 9.
enum class SpectralProfile {
  /// χ(ξ) = e^{−s} Σ_{j<5} s^j/j!, s = ξ²/2. Gaussian decay in x.
  gamma_tail,
  /// χ ≡ 1 on [0, r₁], ≡ 0 on [r₂, ∞), smooth step between. Only sub-exponential decay in x.
  compact,
};

double spectral_multiplier(SpectralProfile profile, double xi, double r1 = 1.0, double r2 = 2.0);

struct SuperKernel {
  SpectralProfile profile = SpectralProfile::gamma_tail;
  double r1 = 1.0, r2 = 2.0;
  GridFunctiond phi;            // samples on [−R, R] computed by Fourier quadrature
  double tail_radius = 12.0;
  double tail_max = 0.0;        // max |φ| outside [−tail_radius, tail_radius] before truncation
  /// Kernel support used when smoothing (|y| beyond this is treated as zero).
  double support = 14.0;

  double eval(double x) const { return deriv(0, x); }
  /// φ^{(m)}(x), 0 ≤ m ≤ 8.
  double deriv(int m, double x) const;
};

/// φ(x) = (1/2π) ∫ e^{ixξ} χ(|ξ|) dξ sampled on [−R, R].
SuperKernel build_superkernel(SpectralProfile profile = SpectralProfile::gamma_tail, double R = 40.0,
                              int points = 8001);

/// Same kernel by quadrature at a single point (slow; used to cross-check closed forms).
double superkernel_quadrature(SpectralProfile profile, int m, double x, double r1 = 1.0, double r2 = 2.0);

/// ∫ y^j φ(y) dy for j = 0..max_order (trapezoid on φ's grid).
std::vector<double> kernel_moments(const GridFunctiond& phi, int max_order);

/// Normalized exp(−1/(1−x²)) on [−1, 1]; derivative callbacks up to order 4.
GridFunctiond build_mollifier(int points = 2001);

/// ψ^{(m)}(x) of the normalized bump, 0 ≤ m ≤ 8.
double mollifier_deriv(int m, double x);

/// A convolution kernel given by its derivatives.
struct SmoothingKernel {
  std::function<double(int, double)> deriv;
  double support = 1.0;
  int max_deriv = 4;
};

SmoothingKernel kernel_of(const SuperKernel& k);
SmoothingKernel mollifier_kernel();

/// f ∗ φ_δ with φ_δ(y) = δ^{−1} φ(y/δ), evaluated by discrete convolution on f's grid.
/// The result carries exact derivative callbacks of that discrete convolution.
GridFunctiond smooth(const GridFunctiond& f, const SmoothingKernel& kernel, double delta,
                     Warnings* warnings = nullptr);

/// Densities that are smooth except at finitely many points, with the Sobolev order q they attain.
struct RoughDensity {
  std::string name;
  std::function<double(double)> pdf;
  int q = 1;
  double lo = -3.0, hi = 3.0;  // sampling box
};

/// Triangle, Laplace, Epanechnikov (q = 1) and uniform (q = 0).
std::vector<RoughDensity> rough_test_family();

struct RateReport {
  std::vector<double> deltas;
  std::vector<double> values;
  std::vector<char> used;  // points kept in the fit
  double slope = 0;
  double r2 = 0;
  double norm_f = 0;       // ‖f‖_{q,l,e}
  double constant = 0;     // max value / (‖f‖ δ^{exponent}) over used points
};

struct RateOptions {
  int max_nodes = 240;
  /// Absolute floor below which LP values are treated as noise (relative to ∫|f|).
  double floor = 1e-12;
};

/// Slope of log d_k(μ_f, μ_{f_δ}) against log δ (super-kernel smoothing).
RateReport rate_kk2(const GridFunctiond& f, int q, int k, int l, const YoungFunction& e,
                    const std::vector<double>& deltas, const RateOptions& opt = {});

/// Slope of log ‖f_δ‖_{n,l,e} against log(1/δ).
RateReport rate_kk3(const GridFunctiond& f, int q, int n, int l, const YoungFunction& e,
                    const std::vector<double>& deltas);

}  // namespace regint
