#pragma once

#include "regint/grid_fn.hpp"

#include <functional>
#include <string>

namespace regint {

enum class YoungKind { power, elog, conjugate_power, conjugate_elog };

/// Young function e: symmetric, convex, e(0)=0, with doubling constant λ.
struct YoungFunction {
  std::string label;
  YoungKind kind = YoungKind::power;
  double p = 2.0;
  double doubling = 4.0;
  std::function<double(double)> eval;

  double operator()(double s) const { return eval(s); }
};

/// Class E_{α,γ}: limsup β_e(R) / (R^α (ln R)^γ) < ∞.
struct OrliczClassTag {
  double alpha;
  double gamma;
};

/// e_p(s) = |s|^p, p > 1.
YoungFunction e_p(double p);
/// e_log(s) = (1+|s|) ln(1+|s|).
YoungFunction e_log();
/// Conjugate e_*(s) = sup_t (s t − e(t)); closed form for e_p, golden section for e_log.
YoungFunction conjugate(const YoungFunction& e);

OrliczClassTag class_tag(const YoungFunction& e);

/// Hölder conjugate exponent p/(p−1).
inline double conjugate_exponent(double p) { return p / (p - 1.0); }

/// sup{c ≥ 0 : e(c) ≤ a}.
double young_inverse(const YoungFunction& e, double a);

/// β_e(R) = R / e^{-1}(R).
double beta(const YoungFunction& e, double R);

/// inf{c > 0 : ∫ e(f/c) ≤ 1}.
double luxembourg_norm(const GridFunctiond& f, const YoungFunction& e);

/// Σ_{|α|≤k} Σ_{|γ|≤l} ‖x^γ ∂_α f‖_e.
double sobolev_orlicz_norm(const GridFunctiond& f, int k, int l, const YoungFunction& e);

/// Σ_{|α|≤k} ∫ (1+|x|)^p |∂_α f| (1 + ln⁺|x| + ln⁺|∂_α f|).
double norm_1plus(const GridFunctiond& f, int k, double p);

struct HolderPair {
  double lhs;
  double rhs;
};

/// (|∫fg|, 2‖f‖_e ‖g‖_{e_*}).
HolderPair holder_orlicz(const GridFunctiond& f, const GridFunctiond& g, const YoungFunction& e);

/// Root of t = 2 ln(1+t) on (0, ∞).
double eps_star();
/// 2 + 1/ln(1+ε_*).
double c_star();

/// ρ_{n,p}(z) = (1 + 2^n |z|)^{−p} sampled on [lo, hi].
GridFunctiond rho_np(int n, double p, double lo, double hi, int points);

/// All multi-indices of order ≤ k in dimension d, graded order.
std::vector<MultiIndex> multi_indices(int d, int k);

}  // namespace regint
