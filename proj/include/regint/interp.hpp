#pragma once

#include "regint/distances.hpp"
#include "regint/grid_fn.hpp"
#include "regint/orlicz.hpp"
#include "regint/superkernel.hpp"

#include <functional>
#include <string>
#include <vector>

namespace regint {

struct InterpParams {
  int q = 0;
  int k = 1;
  int m = 1;
  YoungFunction e = e_p(2.0);
  int N = 5;  // truncation of the series
};

struct NamedDensity {
  std::string name;
  std::function<double(double)> pdf;
};

/// Ten smooth probability densities of unit-order scale (Gaussians, mixtures, sech-type, skew-normal).
std::vector<NamedDensity> standard_test_family();

/// Approximating densities f_n (n = position), with the δ_n or index n that produced them.
struct ApproxFamily {
  std::vector<double> index;
  std::vector<GridFunctiond> densities;
};

/// θ window ((q+k+α)/(q+k+1), 2m/(2m−1)) with α the class tag of e.
std::pair<double, double> theta_window(const InterpParams& p);

/// f_n = f ∗ φ_{δ_n} with the super kernel, δ_n = 2^{−θn}, n = 0..N.
ApproxFamily super_kernel_family(const GridFunctiond& f, double theta, int N);

struct PiReport {
  std::vector<double> dk;            // d_k(μ, μ_n)
  std::vector<double> dist_terms;    // 2^{n(q+k)} β_e(2^n) d_k
  std::vector<double> norm_terms;    // 2^{−2nm} ‖f_n‖_{2m+q,2m,e}
  double dist_sum = 0;
  double norm_sum = 0;
  double value = 0;
  bool tail_ok = true;               // last term ≤ 5% of the total
  Warnings warnings;
};

PiReport pi_functional(const MeasureRep& mu, const ApproxFamily& family, const InterpParams& p,
                       const DkOptions& opt = {});

/// Columns n_or_delta, dk, norm_term, weighted_term.
std::string pi_report_csv(const PiReport& r, const ApproxFamily& family);

struct KeyRatio {
  double lhs = 0;  // ‖f‖_{q,e}
  double pi = 0;
  double ratio = 0;
  PiReport report;
};

/// ‖f‖_{q,e} / π_{q,k,m,e}(μ_f, (μ_{f_n})).
KeyRatio key_inequality_ratio(const GridFunctiond& f, const ApproxFamily& family, const InterpParams& p,
                              const DkOptions& opt = {});

struct CriterionVerdict {
  bool pass = false;
  bool bounded = false;
  bool i2 = false;
  bool i3 = false;
  std::string branch;                // "i2", "i3" or "none"
  std::vector<double> products;      // λ^η d_k (ln 1/δ)^κ per δ
  double sup = 0;
};

/// Balance check: sup_δ λ^η(δ) d_k(δ) (ln 1/δ)^κ bounded and (i2) or (i3) holds.
CriterionVerdict criterion_check(const std::vector<double>& deltas, const std::vector<double>& lambda,
                                 const std::vector<double>& dk, const InterpParams& p, double eta,
                                 double kappa);

/// s_η(q,k,m,p) = (2mη − (q+k+1/p_*))/(2mη) ∧ η/(1+η), d = 1.
double s_eta(int q, int k, int m, double p, double eta, Warnings* warnings = nullptr);

struct ConvReport {
  double theta_pred = 0;
  double theta_meas = 0;
  bool pass = false;
  std::vector<double> eta;
  std::vector<double> err;        // ‖f − f_n‖_{q,p}
  std::vector<double> xnorm;      // ‖f_n‖_{q+2m,2m,p}
  std::vector<double> dk;         // d_k(μ, μ_{f_n})
};

/// L^p branch: checks ‖f_n‖_{q+2m,2m,p} ≤ η^{1/α}, d_k ≤ 1/η for every n, then fits
/// log‖f − f_n‖_{q,p} against log η. Throws listing the failing n when a hypothesis fails.
ConvReport conv_rate_check(const GridFunctiond& f, const std::vector<GridFunctiond>& fn,
                           const std::vector<double>& eta, double alpha, const InterpParams& p,
                           const DkOptions& opt = {});

struct ConvElogReport {
  std::vector<double> eta;
  std::vector<double> err;        // ‖f − f_n‖_{q,e_log}
  std::vector<double> envelope;   // η^{−1/α} + log₂η · η^{−(1−(q+k)/(αm))}
  std::vector<double> xnorm;      // ‖f_n‖_{q+2m,2m,1+}
  std::vector<double> dk;
  double c_first = 0;             // err/envelope at the first n
  double c_max = 0;               // max err/envelope
  bool pass = false;              // c_max ≤ 2 c_first
};

ConvElogReport conv_elog_check(const GridFunctiond& f, const std::vector<GridFunctiond>& fn,
                               const std::vector<double>& eta, double alpha, const InterpParams& p,
                               const DkOptions& opt = {});

/// K(μ, t) restricted to a candidate family, with d_k as Y-norm and ‖·‖_{q+2m,2m,e} as X-norm.
struct KFunctional {
  std::vector<double> dk;
  std::vector<double> xnorm;
  double operator()(double t) const;
};

KFunctional k_functional(const MeasureRep& y, const ApproxFamily& family, const InterpParams& p,
                         const DkOptions& opt = {});

/// Σ_{n=0..N} 2^{2mnγ} K(2^{−2mn}).
double k_discrete_sum(const KFunctional& K, double gamma, int m, int N);
/// ∫_{t_lo}^{1} t^{−γ} K(t) dt/t by quadrature in log t.
double k_integral(const KFunctional& K, double gamma, double t_lo);

struct BesovReport {
  double s_i = 0;
  double s_ii = 0;
  double estimate = 0;
  bool in_range = true;
  std::vector<double> norms_i, norms_ii;
};

/// Slopes of ‖∂(f∗φ_δ)‖_p and ‖∂(f∗φ^i_δ)‖_p, φ^i_δ(x) = xφ_δ(x), φ the nonneg mollifier.
BesovReport besov_estimate(const GridFunctiond& f, double p, const std::vector<double>& deltas);

}  // namespace regint
