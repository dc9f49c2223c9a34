#include "regint/interp.hpp"

#include "regint/fit.hpp"
#include "regint/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace regint {

namespace {

GridDensity as_density(const GridFunctiond& f) { return GridDensity{f.with_values(f.values())}; }

GridFunctiond difference(const GridFunctiond& f, const GridFunctiond& g) {
  if (!f.same_grid(g)) throw std::invalid_argument("interp: densities must share a grid");
  return f.with_values(f.values() - g.values());
}

double class_alpha(const YoungFunction& e) { return class_tag(e).alpha; }

}  // namespace

std::vector<NamedDensity> standard_test_family() {
  auto gauss = [](double m, double s) {
    return [m, s](double x) { return std::exp(-0.5 * (x - m) * (x - m) / (s * s)) / (s * std::sqrt(2.0 * M_PI)); };
  };
  const auto g01 = gauss(0.0, 1.0);
  return {
      {"normal", g01},
      {"normal_shifted_narrow", gauss(0.3, 0.8)},
      {"normal_wide", gauss(-0.2, 1.2)},
      {"bimodal_symmetric",
       [a = gauss(-0.8, 0.7), b = gauss(0.8, 0.7)](double x) { return 0.5 * a(x) + 0.5 * b(x); }},
      {"bimodal_skewed", [a = g01, b = gauss(1.5, 0.8)](double x) { return 0.7 * a(x) + 0.3 * b(x); }},
      {"logistic_scaled", [](double x) { const double c = 1.0 / std::cosh(1.5 * x); return 0.75 * c * c; }},
      {"hyperbolic_secant", [](double x) { return 0.5 / std::cosh(0.5 * M_PI * x); }},
      {"skew_normal", [g01](double x) { return 2.0 * g01(x) * 0.5 * std::erfc(-2.0 * x / std::sqrt(2.0)); }},
      {"normal_x2", [g01](double x) { return x * x * g01(x); }},
      {"scale_mixture",
       [a = gauss(0.0, 0.5), b = gauss(0.0, 1.5)](double x) { return 0.5 * a(x) + 0.5 * b(x); }},
  };
}

std::pair<double, double> theta_window(const InterpParams& p) {
  const double lo = (p.q + p.k + class_alpha(p.e)) / double(p.q + p.k + 1);
  const double hi = 2.0 * p.m / (2.0 * p.m - 1.0);
  return {lo, hi};
}

ApproxFamily super_kernel_family(const GridFunctiond& f, double theta, int N) {
  if (!(theta > 0.0) || N < 0) throw std::invalid_argument("super_kernel_family: need θ > 0 and N ≥ 0");
  static const SuperKernel sk = build_superkernel();
  const auto kern = kernel_of(sk);
  ApproxFamily fam;
  fam.index.resize(N + 1);
  fam.densities.resize(N + 1);
  parallel_for(N + 1, default_workers(), [&](long n) {
    const double delta = std::pow(2.0, -theta * double(n));
    fam.index[n] = delta;
    fam.densities[n] = smooth(f, kern, delta);
  });
  return fam;
}

PiReport pi_functional(const MeasureRep& mu, const ApproxFamily& family, const InterpParams& p,
                       const DkOptions& opt) {
  if (p.k < 0 || p.k > 3) throw std::invalid_argument("pi_functional: k must lie in 0..3");
  if (p.N < 0 || p.N > 12) throw std::invalid_argument("pi_functional: N must lie in 0..12");
  if (p.m < 1) throw std::invalid_argument("pi_functional: m must be at least 1");
  if (int(family.densities.size()) < p.N + 1) throw std::invalid_argument("pi_functional: family shorter than N+1");
  PiReport r;
  const int N = p.N;
  r.dk.assign(N + 1, 0.0);
  r.dist_terms.assign(N + 1, 0.0);
  r.norm_terms.assign(N + 1, 0.0);
  parallel_for(N + 1, default_workers(), [&](long n) {
    const auto& fn = family.densities[n];
    r.dk[n] = dk_lp(mu, as_density(fn), p.k, opt);
    const double R = std::ldexp(1.0, int(n));
    r.dist_terms[n] = std::ldexp(1.0, int(n) * (p.q + p.k)) * beta(p.e, R) * r.dk[n];
    r.norm_terms[n] = std::ldexp(1.0, -2 * int(n) * p.m) * sobolev_orlicz_norm(fn, 2 * p.m + p.q, 2 * p.m, p.e);
  });
  for (int n = 0; n <= N; ++n) {
    r.dist_sum += r.dist_terms[n];
    r.norm_sum += r.norm_terms[n];
  }
  r.value = r.dist_sum + r.norm_sum;
  const double last = r.dist_terms[N] + r.norm_terms[N];
  r.tail_ok = N == 0 || last <= 0.05 * r.value;
  if (!r.tail_ok) warn(&r.warnings, "pi_functional: tail not converged (last term above 5% of the sum)");
  return r;
}

std::string pi_report_csv(const PiReport& r, const ApproxFamily& family) {
  std::ostringstream os;
  os.precision(17);
  os << "n_or_delta,dk,norm_term,weighted_term\n";
  for (size_t n = 0; n < r.dk.size(); ++n)
    os << (n < family.index.size() ? family.index[n] : double(n)) << "," << r.dk[n] << "," << r.norm_terms[n]
       << "," << r.dist_terms[n] << "\n";
  return os.str();
}

KeyRatio key_inequality_ratio(const GridFunctiond& f, const ApproxFamily& family, const InterpParams& p,
                              const DkOptions& opt) {
  KeyRatio kr;
  kr.lhs = sobolev_orlicz_norm(f, p.q, 0, p.e);
  if (!(kr.lhs > 0.0)) throw std::invalid_argument("key_inequality_ratio: zero function rejected");
  kr.report = pi_functional(as_density(f), family, p, opt);
  kr.pi = kr.report.value;
  if (!(kr.pi > 0.0)) throw std::invalid_argument("key_inequality_ratio: zero denominator");
  kr.ratio = kr.lhs / kr.pi;
  return kr;
}

CriterionVerdict criterion_check(const std::vector<double>& deltas, const std::vector<double>& lambda,
                                 const std::vector<double>& dk, const InterpParams& p, double eta,
                                 double kappa) {
  const size_t n = deltas.size();
  if (n < 3 || lambda.size() != n || dk.size() != n)
    throw std::invalid_argument("criterion_check: need three or more paired samples");
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return deltas[a] < deltas[b]; });
  for (size_t t = 0; t + 1 < n; ++t) {
    const double a = lambda[order[t]], b = lambda[order[t + 1]];
    if (b > a * (1.0 + 1e-9) + 1e-300)
      throw std::invalid_argument("criterion_check: λ samples must be non-increasing in δ");
  }
  CriterionVerdict v;
  v.products.resize(n);
  for (size_t i = 0; i < n; ++i) {
    if (!(deltas[i] > 0.0 && deltas[i] < 1.0)) throw std::invalid_argument("criterion_check: δ must lie in (0, 1)");
    v.products[i] = std::pow(lambda[i], eta) * dk[i] * std::pow(std::log(1.0 / deltas[i]), kappa);
  }
  v.sup = *std::max_element(v.products.begin(), v.products.end());
  double small = 0;
  for (size_t t = 0; t < std::min<size_t>(3, n); ++t) small = std::max(small, v.products[order[t]]);
  v.bounded = small <= 2.0 * median(v.products);
  const auto tag = class_tag(p.e);
  const double threshold = (p.q + p.k + tag.alpha) / (2.0 * p.m);
  v.i2 = eta > threshold;
  v.i3 = kappa > 1.0 + tag.gamma + eta;
  v.branch = v.i2 ? "i2" : (v.i3 ? "i3" : "none");
  v.pass = v.bounded && (v.i2 || v.i3);
  return v;
}

double s_eta(int q, int k, int m, double p, double eta, Warnings* warnings) {
  if (!(p > 1.0) || !(eta > 0.0) || m < 1) throw std::invalid_argument("s_eta: need p > 1, η > 0, m ≥ 1");
  const double pstar = conjugate_exponent(p);
  const double first = (2.0 * m * eta - (q + k + 1.0 / pstar)) / (2.0 * m * eta);
  if (first <= 0.0) warn(warnings, "s_eta: η below (q+k+1/p_*)/2m, first branch nonpositive");
  return std::min(first, eta / (1.0 + eta));
}

namespace {

void check_eta(const std::vector<double>& eta) {
  for (size_t i = 0; i < eta.size(); ++i) {
    if (!(eta[i] > 0.0) || !std::isfinite(eta[i])) throw std::invalid_argument("conv: η must be positive and finite");
    if (i > 0 && eta[i] < eta[i - 1]) throw std::invalid_argument("conv: η must be non-decreasing");
  }
}

std::string list_failures(const std::vector<int>& bad, const char* what) {
  std::ostringstream os;
  os << "conv: hypothesis violated (" << what << ") at n =";
  for (int b : bad) os << " " << b;
  return os.str();
}

}  // namespace

ConvReport conv_rate_check(const GridFunctiond& f, const std::vector<GridFunctiond>& fn,
                           const std::vector<double>& eta, double alpha, const InterpParams& p,
                           const DkOptions& opt) {
  if (fn.size() != eta.size() || fn.size() < 4) throw std::invalid_argument("conv_rate_check: need ≥ 4 paired (f_n, η(n))");
  if (p.e.kind != YoungKind::power) throw std::invalid_argument("conv_rate_check: L^p branch needs e = e_p");
  check_eta(eta);
  const double pstar = conjugate_exponent(p.e.p);
  const double need = (p.q + p.k + 1.0 / pstar) / p.m;
  if (!(alpha > need)) throw std::invalid_argument("conv_rate_check: α must exceed (q+k+d/p_*)/m");
  ConvReport r;
  r.eta = eta;
  const size_t L = fn.size();
  r.err.assign(L, 0.0);
  r.xnorm.assign(L, 0.0);
  r.dk.assign(L, 0.0);
  parallel_for(long(L), default_workers(), [&](long i) {
    r.xnorm[i] = sobolev_orlicz_norm(fn[i], p.q + 2 * p.m, 2 * p.m, p.e);
    r.dk[i] = dk_lp(as_density(f), as_density(fn[i]), p.k, opt);
    r.err[i] = sobolev_orlicz_norm(difference(f, fn[i]), p.q, 0, p.e);
  });
  std::vector<int> bad_norm, bad_dk;
  for (size_t i = 0; i < L; ++i) {
    if (r.xnorm[i] > std::pow(eta[i], 1.0 / alpha) * (1.0 + 1e-12)) bad_norm.push_back(int(i));
    if (r.dk[i] > (1.0 + 1e-12) / eta[i]) bad_dk.push_back(int(i));
  }
  if (!bad_norm.empty()) throw std::runtime_error(list_failures(bad_norm, "norm bound"));
  if (!bad_dk.empty()) throw std::runtime_error(list_failures(bad_dk, "distance bound"));
  r.theta_pred = std::min(1.0 / alpha, 1.0 - (p.q + p.k + 1.0 / pstar) / (alpha * p.m));
  const bool all_zero = std::all_of(r.err.begin(), r.err.end(), [](double v) { return v == 0.0; });
  if (all_zero) {
    r.theta_meas = std::numeric_limits<double>::infinity();
  } else {
    r.theta_meas = -loglog_fit(eta, r.err).slope;
  }
  r.pass = r.theta_meas >= 0.9 * r.theta_pred;
  return r;
}

ConvElogReport conv_elog_check(const GridFunctiond& f, const std::vector<GridFunctiond>& fn,
                               const std::vector<double>& eta, double alpha, const InterpParams& p,
                               const DkOptions& opt) {
  if (fn.size() != eta.size() || fn.size() < 4) throw std::invalid_argument("conv_elog_check: need ≥ 4 paired (f_n, η(n))");
  check_eta(eta);
  if (!(alpha > double(p.q + p.k) / p.m)) throw std::invalid_argument("conv_elog_check: α must exceed (q+k)/m");
  ConvElogReport r;
  r.eta = eta;
  const size_t L = fn.size();
  r.err.assign(L, 0.0);
  r.xnorm.assign(L, 0.0);
  r.dk.assign(L, 0.0);
  r.envelope.assign(L, 0.0);
  const auto elog = e_log();
  parallel_for(long(L), default_workers(), [&](long i) {
    r.xnorm[i] = norm_1plus(fn[i], p.q + 2 * p.m, 2.0 * p.m);
    r.dk[i] = dk_lp(as_density(f), as_density(fn[i]), p.k, opt);
    r.err[i] = sobolev_orlicz_norm(difference(f, fn[i]), p.q, 0, elog);
  });
  std::vector<int> bad_norm, bad_dk;
  for (size_t i = 0; i < L; ++i) {
    if (r.xnorm[i] > std::pow(eta[i], 1.0 / alpha) * (1.0 + 1e-12)) bad_norm.push_back(int(i));
    if (r.dk[i] > (1.0 + 1e-12) / eta[i]) bad_dk.push_back(int(i));
  }
  if (!bad_norm.empty()) throw std::runtime_error(list_failures(bad_norm, "norm bound"));
  if (!bad_dk.empty()) throw std::runtime_error(list_failures(bad_dk, "distance bound"));
  const double ex = 1.0 - double(p.q + p.k) / (alpha * p.m);
  for (size_t i = 0; i < L; ++i) {
    r.envelope[i] = std::pow(eta[i], -1.0 / alpha) + std::log2(eta[i]) * std::pow(eta[i], -ex);
    const double c = r.err[i] / r.envelope[i];
    if (i == 0) r.c_first = c;
    r.c_max = std::max(r.c_max, c);
  }
  r.pass = r.c_max <= 2.0 * r.c_first;
  return r;
}

double KFunctional::operator()(double t) const {
  if (dk.empty()) throw std::invalid_argument("k_functional: empty family");
  double best = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < dk.size(); ++i) best = std::min(best, dk[i] + t * xnorm[i]);
  return best;
}

KFunctional k_functional(const MeasureRep& y, const ApproxFamily& family, const InterpParams& p,
                         const DkOptions& opt) {
  if (family.densities.empty()) throw std::invalid_argument("k_functional: empty family");
  KFunctional K;
  const size_t L = family.densities.size();
  K.dk.assign(L, 0.0);
  K.xnorm.assign(L, 0.0);
  parallel_for(long(L), default_workers(), [&](long i) {
    K.dk[i] = dk_lp(y, as_density(family.densities[i]), p.k, opt);
    K.xnorm[i] = sobolev_orlicz_norm(family.densities[i], p.q + 2 * p.m, 2 * p.m, p.e);
  });
  return K;
}

double k_discrete_sum(const KFunctional& K, double gamma, int m, int N) {
  double s = 0;
  for (int n = 0; n <= N; ++n) s += std::pow(2.0, 2.0 * m * n * gamma) * K(std::pow(2.0, -2.0 * m * n));
  return s;
}

double k_integral(const KFunctional& K, double gamma, double t_lo) {
  if (!(t_lo > 0.0 && t_lo < 1.0)) throw std::invalid_argument("k_integral: t_lo must lie in (0, 1)");
  const int M = 4001;
  const double a = std::log(t_lo);
  const double h = -a / (M - 1);
  double s = 0;
  for (int i = 0; i < M; ++i) {
    const double u = a + h * i;
    const double w = (i == 0 || i == M - 1) ? 0.5 : 1.0;
    s += w * std::exp(-gamma * u) * K(std::exp(u));
  }
  return s * h;
}

BesovReport besov_estimate(const GridFunctiond& f, double p, const std::vector<double>& deltas) {
  if (deltas.empty()) throw std::invalid_argument("besov_estimate: empty δ list");
  if (deltas.size() < 3) throw std::invalid_argument("besov_estimate: fit needs at least 3 points");
  const double dmin = *std::min_element(deltas.begin(), deltas.end());
  // Below ~40 nodes per kernel radius the discrete x·φ_δ loses its vanishing mass and the fit flattens.
  if (dmin < 40.0 * f.spacing())
    throw std::domain_error("besov_estimate: smallest δ spans fewer than 40 grid steps");
  const auto ep = e_p(p);
  const SmoothingKernel phi = mollifier_kernel();
  SmoothingKernel xphi;
  xphi.support = 1.0;
  xphi.max_deriv = 3;
  xphi.deriv = [](int m, double y) {
    return y * mollifier_deriv(m, y) + (m > 0 ? m * mollifier_deriv(m - 1, y) : 0.0);
  };
  BesovReport r;
  const size_t L = deltas.size();
  r.norms_i.assign(L, 0.0);
  r.norms_ii.assign(L, 0.0);
  parallel_for(long(L), default_workers(), [&](long i) {
    const double d = deltas[i];
    r.norms_i[i] = luxembourg_norm(derivative(smooth(f, phi, d), {1, 0}), ep);
    // x φ_δ(x) = δ · (yφ)_δ(x).
    r.norms_ii[i] = d * luxembourg_norm(derivative(smooth(f, xphi, d), {1, 0}), ep);
  });
  std::vector<double> inv;
  for (double d : deltas) inv.push_back(1.0 / d);
  const double slope_i = loglog_fit(inv, r.norms_i).slope;
  const double slope_ii = loglog_fit(deltas, r.norms_ii).slope;
  r.s_i = 1.0 - slope_i;
  r.s_ii = slope_ii;
  r.in_range = slope_i > -0.5 && slope_i < 1.5 && slope_ii > -0.5 && slope_ii < 1.5;
  r.estimate = std::clamp(std::min(r.s_i, r.s_ii), 0.0, 1.0);
  return r;
}

}  // namespace regint
