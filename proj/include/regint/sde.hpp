#pragma once

#include "regint/grid_fn.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace regint {

/// What a coefficient may read at time t: the discrete past of one path.
struct PathState {
  double t = 0;
  double x = 0;                      // current value
  const std::vector<double>* history = nullptr;  // values at 0, dt, …, t
  double running_mean = 0;           // time average of the path on [0, t]
  double running_max = 0;
  double running_min = 0;
};

/// dX = σ(t, X) dW + b(t, X) dt in d = n = 1, coefficients being path functionals.
struct SdeModel {
  std::string name;
  std::function<double(const PathState&)> sigma;
  std::function<double(const PathState&)> drift;
  double x0 = 0;
  double lambda_lo = 1.0;  // λ_* ≤ σ²
  double lambda_hi = 1.0;  // σ² ≤ λ^*
  double C = 0.3;          // modulus constant
  double eps = 0.5;        // modulus exponent 2 + ε
};

/// σ(x) = 1 + 0.3·min(1, (ln(1/|x−x₀|))^{−(2+ε)}), |x−x₀| clamped below by 1e−12;
/// bounded path-dependent drift b = 0.2·tanh(running mean − x).
SdeModel logholder_model(double eps = 0.5);
/// σ ≡ s, b ≡ c.
SdeModel constant_model(double s = 1.0, double c = 0.0);
/// σ(t) = 1 for t < t_jump and 2 afterwards: violates the time modulus.
SdeModel jump_control_model(double t_jump);

/// Endpoint data for one δ: X_{T−δ}, σ(T−δ, X) and W_T − W_{T−δ} per path.
struct SdeSnapshot {
  double delta = 0;
  std::vector<double> x_before;
  std::vector<double> sigma_before;
  std::vector<double> dw;
};

struct SdeRun {
  double T = 1, dt = 0;
  int n = 0;
  std::uint64_t seed = 0;
  std::vector<double> x_T;
  std::vector<SdeSnapshot> snapshots;  // δ = T and δ = 2^{−j} in (10 dt, T/2]
  double sigma2_min = 0, sigma2_max = 0;  // observed along all paths
  bool ellipticity_ok = true;             // observed σ² within [λ_*, λ^*]

  const SdeSnapshot& snapshot(double delta) const;
  /// X_T^δ = X_{T−δ} + σ(T−δ)(W_T − W_{T−δ}).
  std::vector<double> x_delta(double delta) const;
};

/// Euler–Maruyama; path i draws from its own stream (seed, i), so the output does not
/// depend on the worker count. T/dt must be an integer.
SdeRun simulate_pathdep(const SdeModel& model, double T, double dt, int n, std::uint64_t seed,
                        int workers = 0);

struct OneStep {
  std::vector<double> samples;  // X_T^δ per path
  /// p_δ(y) = (1/n) Σ_i γ_{δσ_i²}(y − X_{T−δ,i}); callbacks give ∂^j p_δ at grid nodes, j ≤ max_deriv.
  GridFunctiond density;
  int max_deriv = 8;
};

OneStep one_step_gaussian(const SdeRun& run, double delta, int max_deriv = 8);

struct Ito6Report {
  std::vector<double> deltas;
  std::vector<double> e_abs;       // E|X_T − X_T^δ|
  std::vector<double> se;
  std::vector<double> d1;          // d_1 LP between the two endpoint clouds
  std::vector<double> normalized;  // E|X_T − X_T^δ| δ^{−1/2} (ln 1/δ)^{2+ε}
  double max_over_median = 0;
  bool bounded = false;
  bool d1_ok = false;              // d_1 ≤ E|X_T − X_T^δ| + tolerance at every δ
  bool pass = false;
};

/// Throws when the Monte Carlo standard error exceeds 20% of a nonzero E|X_T − X_T^δ|.
Ito6Report verify_ito6(const SdeRun& run, const std::vector<double>& deltas, double eps);

struct Ito8Report {
  std::vector<double> deltas;
  std::vector<double> norms;  // ‖p_δ‖_{2m,2m,1+}
  double slope = 0;           // against log(1/δ)
  double r2 = 0;
  bool pass = false;          // slope ≤ 1.1 m and R² ≥ 0.95
};

Ito8Report verify_ito8(const SdeRun& run, const std::vector<double>& deltas, int m);

struct BalanceReport {
  std::vector<double> deltas;
  std::vector<double> lambda;      // non-increasing envelope of ‖p_δ‖_{2m,2m,1+}
  std::vector<double> e_abs;
  std::vector<double> products;    // λ^{1/2m} E|X_T − X_T^δ| (ln 1/δ)^{2+1/2m}
  double max_over_median = 0;
  bool pass = false;               // max/median ≤ 3
};

/// Deltas are sorted decreasing before the envelope is taken.
BalanceReport balance_report(const SdeRun& run, const std::vector<double>& deltas, int m);

}  // namespace regint
