#include "regint/orlicz.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace regint {

namespace {

double elog(double s) {
  const double a = std::abs(s);
  return (1.0 + a) * std::log1p(a);
}

// sup_{t ≥ 0} (s t − e(t)) for e = e_log, by golden section.
double elog_conjugate(double s) {
  s = std::abs(s);
  auto obj = [s](double t) { return s * t - elog(t); };
  // e'(t) = ln(1+t) + 1, so the objective decreases once t > e^{s−1} − 1.
  double hi = 1.0;
  for (int i = 0; i < 2000 && s - (std::log1p(hi) + 1.0) > 0.0; ++i) hi *= 2.0;
  double lo = 0.0;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
  double fa = obj(a), fb = obj(b);
  for (int it = 0; it < 300 && hi - lo > 1e-14 * (1.0 + hi); ++it) {
    if (fa < fb) {
      lo = a;
      a = b;
      fa = fb;
      b = lo + g * (hi - lo);
      fb = obj(b);
    } else {
      hi = b;
      b = a;
      fb = fa;
      a = hi - g * (hi - lo);
      fa = obj(a);
    }
  }
  return std::max(0.0, std::max({obj(lo), obj(hi), obj(0.5 * (lo + hi))}));
}

}  // namespace

YoungFunction e_p(double p) {
  if (!(p > 1.0)) throw std::invalid_argument("e_p: p must exceed 1");
  YoungFunction e;
  e.label = "e_" + std::to_string(p);
  e.kind = YoungKind::power;
  e.p = p;
  e.doubling = std::pow(2.0, p);
  e.eval = [p](double s) { return std::pow(std::abs(s), p); };
  return e;
}

YoungFunction e_log() {
  YoungFunction e;
  e.label = "e_log";
  e.kind = YoungKind::elog;
  e.p = 0.0;
  e.doubling = 2.5;
  e.eval = elog;
  return e;
}

YoungFunction conjugate(const YoungFunction& e) {
  YoungFunction c;
  switch (e.kind) {
    case YoungKind::power: {
      const double p = e.p, q = conjugate_exponent(p);
      c.label = e.label + "_*";
      c.kind = YoungKind::conjugate_power;
      c.p = q;
      c.doubling = std::pow(2.0, q);
      c.eval = [p, q](double s) { return (p - 1.0) * std::pow(std::abs(s) / p, q); };
      return c;
    }
    case YoungKind::elog:
      c.label = "e_log_*";
      c.kind = YoungKind::conjugate_elog;
      c.doubling = std::numeric_limits<double>::infinity();
      c.eval = elog_conjugate;
      return c;
    default:
      throw std::invalid_argument("conjugate: only builtin Young functions are supported");
  }
}

OrliczClassTag class_tag(const YoungFunction& e) {
  if (e.kind == YoungKind::power) return {1.0 / conjugate_exponent(e.p), 0.0};
  if (e.kind == YoungKind::elog) return {0.0, 1.0};
  throw std::invalid_argument("class_tag: unsupported Young function");
}

double young_inverse(const YoungFunction& e, double a) {
  if (a < 0.0) throw std::invalid_argument("young_inverse: negative argument");
  if (a == 0.0) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (e(hi) <= a) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw std::runtime_error("young_inverse: no bracket");
  }
  while (hi - lo > 1e-13 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (e(mid) <= a)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

double beta(const YoungFunction& e, double R) {
  if (!(R > 0.0)) throw std::invalid_argument("beta: R must be positive");
  return R / young_inverse(e, R);
}

double luxembourg_norm(const GridFunctiond& f, const YoungFunction& e) {
  const Eigen::VectorXd a = f.values().cwiseAbs();
  if (a.maxCoeff() == 0.0) return 0.0;
  Eigen::VectorXd buf(a.size());
  auto modular = [&](double c) {
    for (Eigen::Index i = 0; i < a.size(); ++i) buf[i] = e(a[i] / c);
    return integrate(f.with_values(buf));
  };
  const double c0 = std::max(1e-12, integrate(f.with_values(a)));
  double hi = c0;
  int k = 0;
  while (modular(hi) > 1.0) {
    hi *= 2.0;
    if (++k > 200) throw std::runtime_error("luxembourg_norm: bracket not found in 200 doublings");
  }
  double lo = hi;
  k = 0;
  while (modular(lo) <= 1.0) {
    lo *= 0.5;
    if (++k > 200) throw std::runtime_error("luxembourg_norm: bracket not found in 200 halvings");
  }
  for (int it = 0; it < 200 && hi / lo - 1.0 > 1e-13; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (modular(mid) <= 1.0)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

std::vector<MultiIndex> multi_indices(int d, int k) {
  std::vector<MultiIndex> out;
  for (int s = 0; s <= k; ++s) {
    if (d == 1) {
      out.push_back({s, 0});
    } else {
      for (int i = s; i >= 0; --i) out.push_back({i, s - i});
    }
  }
  return out;
}

double sobolev_orlicz_norm(const GridFunctiond& f, int k, int l, const YoungFunction& e) {
  double total = 0.0;
  for (const auto& alpha : multi_indices(f.dim(), k)) {
    const GridFunctiond da = derivative(f, alpha);
    for (const auto& gamma : multi_indices(f.dim(), l))
      total += luxembourg_norm(monomial_multiply(da, gamma), e);
  }
  return total;
}

double norm_1plus(const GridFunctiond& f, int k, double p) {
  double total = 0.0;
  for (const auto& alpha : multi_indices(f.dim(), k)) {
    const GridFunctiond da = derivative(f, alpha);
    Eigen::VectorXd v(da.size());
    for (Eigen::Index idx = 0; idx < da.size(); ++idx) {
      double r;
      if (f.dim() == 1) {
        r = std::abs(da.x(int(idx)));
      } else {
        const int i = int(idx / f.n(1)), j = int(idx % f.n(1));
        r = std::hypot(da.coord(0, i), da.coord(1, j));
      }
      const double g = std::abs(da[idx]);
      const double lnx = r > 1.0 ? std::log(r) : 0.0;
      const double lng = g > 1.0 ? std::log(g) : 0.0;
      v[idx] = std::pow(1.0 + r, p) * g * (1.0 + lnx + lng);
    }
    total += integrate(da.with_values(std::move(v)));
  }
  return total;
}

HolderPair holder_orlicz(const GridFunctiond& f, const GridFunctiond& g, const YoungFunction& e) {
  if (!f.same_grid(g)) throw std::invalid_argument("holder_orlicz: grids differ");
  const double lhs = std::abs(integrate(f.with_values(f.values().cwiseProduct(g.values()))));
  const double rhs = 2.0 * luxembourg_norm(f, e) * luxembourg_norm(g, conjugate(e));
  return {lhs, rhs};
}

double eps_star() {
  static const double value = [] {
    double lo = 1.0, hi = 4.0;  // t − 2 ln(1+t) < 0 at 1, > 0 at 4
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (mid - 2.0 * std::log1p(mid) < 0.0)
        lo = mid;
      else
        hi = mid;
    }
    return 0.5 * (lo + hi);
  }();
  return value;
}

double c_star() { return 2.0 + 1.0 / std::log1p(eps_star()); }

GridFunctiond rho_np(int n, double p, double lo, double hi, int points) {
  const double s = std::ldexp(1.0, n);
  return GridFunctiond::sample(lo, hi, points, [&](double z) { return std::pow(1.0 + s * std::abs(z), -p); });
}

}  // namespace regint
