#include "regint/superkernel.hpp"

#include "regint/distances.hpp"
#include "regint/fit.hpp"
#include "regint/hermite.hpp"
#include "regint/parallel.hpp"

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <cmath>
#include <stdexcept>

namespace regint {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kMaxDeriv = 8;
constexpr int kTailTerms = 5;

using Poly = std::vector<double>;  // ascending coefficients

double horner(const Poly& p, double x) {
  double s = 0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) s = s * x + *it;
  return s;
}

Poly poly_deriv(const Poly& p) {
  if (p.size() <= 1) return {0.0};
  Poly d(p.size() - 1);
  for (size_t i = 1; i < p.size(); ++i) d[i - 1] = double(i) * p[i];
  return d;
}

Poly poly_add(Poly a, const Poly& b, double s = 1.0) {
  if (a.size() < b.size()) a.resize(b.size(), 0.0);
  for (size_t i = 0; i < b.size(); ++i) a[i] += s * b[i];
  return a;
}

Poly poly_mul(const Poly& a, const Poly& b) {
  Poly c(a.size() + b.size() - 1, 0.0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

// φ^{(m)}(x) = Q_m(x) g(x), g the standard normal density.
const std::array<Poly, kMaxDeriv + 1>& gamma_tail_polys() {
  static const std::array<Poly, kMaxDeriv + 1> Q = [] {
    std::vector<Poly> he{{1.0}, {0.0, 1.0}};
    for (int n = 1; n < 2 * kTailTerms; ++n)
      he.push_back(poly_add(poly_mul({0.0, 1.0}, he[n]), he[n - 1], -double(n)));
    Poly P{0.0};
    double c = 1.0;  // (−1)^j / (2^j j!)
    for (int j = 0; j < kTailTerms; ++j) {
      P = poly_add(P, he[2 * j], c);
      c *= -1.0 / (2.0 * (j + 1));
    }
    std::array<Poly, kMaxDeriv + 1> out;
    out[0] = P;
    for (int m = 1; m <= kMaxDeriv; ++m)
      out[m] = poly_add(poly_deriv(out[m - 1]), poly_mul({0.0, 1.0}, out[m - 1]), -1.0);
    return out;
  }();
  return Q;
}

double gamma_tail_deriv(int m, double x) {
  return horner(gamma_tail_polys()[m], x) * std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi);
}

// ψ^{(m)} = P_m(x) (1−x²)^{−2m} ψ.
const std::array<Poly, kMaxDeriv + 1>& bump_polys() {
  static const std::array<Poly, kMaxDeriv + 1> P = [] {
    std::array<Poly, kMaxDeriv + 1> out;
    out[0] = {1.0};
    const Poly u{1.0, 0.0, -1.0};
    const Poly u2 = poly_mul(u, u);
    for (int m = 0; m < kMaxDeriv; ++m) {
      Poly next = poly_mul(poly_deriv(out[m]), u2);
      next = poly_add(next, poly_mul(poly_mul({0.0, 4.0 * m}, out[m]), u));
      next = poly_add(next, poly_mul({0.0, -2.0}, out[m]));
      out[m + 1] = next;
    }
    return out;
  }();
  return P;
}

double bump_raw(int m, double x) {
  const double u = 1.0 - x * x;
  if (u <= 0.0) return 0.0;
  return horner(bump_polys()[m], x) * std::exp(-1.0 / u - 2.0 * m * std::log(u));
}

double bump_mass() {
  static const double Z = [] {
    const int n = 400001;
    const double h = 2.0 / (n - 1);
    double s = 0;
    for (int i = 1; i + 1 < n; ++i) s += bump_raw(0, -1.0 + h * i);
    return s * h;
  }();
  return Z;
}

// 16-point Gauss–Legendre on [−1, 1].
constexpr std::array<double, 8> kGlX{0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                                     0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                                     0.9445750230732326, 0.9894009349916499};
constexpr std::array<double, 8> kGlW{0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                                     0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                                     0.0622535239386479, 0.0271524594117541};

}  // namespace

double spectral_multiplier(SpectralProfile profile, double xi, double r1, double r2) {
  xi = std::abs(xi);
  if (profile == SpectralProfile::gamma_tail) {
    const double s = 0.5 * xi * xi;
    double term = 1.0, sum = 1.0;
    for (int j = 1; j < kTailTerms; ++j) {
      term *= s / j;
      sum += term;
    }
    return std::exp(-s) * sum;
  }
  if (xi <= r1) return 1.0;
  if (xi >= r2) return 0.0;
  return 1.0 - smooth_step((xi - r1) / (r2 - r1));
}

double superkernel_quadrature(SpectralProfile profile, int m, double x, double r1, double r2) {
  if (m < 0 || m > kMaxDeriv) throw std::invalid_argument("superkernel: derivative order out of range");
  const double top = profile == SpectralProfile::gamma_tail ? 14.0 : r2;
  const double width = 0.05;
  const int panels = int(std::ceil(top / width));
  const double hw = 0.5 * top / panels;
  double s = 0;
  for (int p = 0; p < panels; ++p) {
    const double mid = (2 * p + 1) * hw;
    for (int i = 0; i < 8; ++i)
      for (int sgn = -1; sgn <= 1; sgn += 2) {
        const double xi = mid + sgn * hw * kGlX[i];
        // d^m/dx^m cos(xξ) = ξ^m cos(xξ + mπ/2).
        s += kGlW[i] * std::pow(xi, m) * std::cos(x * xi + 0.5 * kPi * m) *
             spectral_multiplier(profile, xi, r1, r2);
      }
  }
  return s * hw / kPi;
}

double SuperKernel::deriv(int m, double x) const {
  if (m < 0 || m > kMaxDeriv) throw std::invalid_argument("superkernel: derivative order out of range");
  if (profile == SpectralProfile::gamma_tail) return gamma_tail_deriv(m, x);
  if (m == 0) return std::abs(x) > phi.hi() ? 0.0 : interpolate(phi, x);
  return superkernel_quadrature(profile, m, x, r1, r2);
}

SuperKernel build_superkernel(SpectralProfile profile, double R, int points) {
  if (!(R > 0.0) || points < 8) throw std::invalid_argument("build_superkernel: bad grid");
  SuperKernel k;
  k.profile = profile;
  k.support = profile == SpectralProfile::gamma_tail ? 14.0 : R;
  k.tail_radius = profile == SpectralProfile::gamma_tail ? 12.0 : 0.5 * R;
  Eigen::VectorXd v(points);
  const double h = 2.0 * R / (points - 1);
  // φ is even: compute one half.
  for (int i = 0; i < points; ++i) {
    const int mirror = points - 1 - i;
    if (mirror < i) {
      v[i] = v[mirror];
      continue;
    }
    v[i] = superkernel_quadrature(profile, 0, -R + h * i, k.r1, k.r2);
  }
  // Beyond the tail radius the samples are pure cancellation noise; record the
  // certificate, then truncate so high moments are not polluted by it.
  for (int i = 0; i < points; ++i)
    if (std::abs(-R + h * i) > k.tail_radius) {
      k.tail_max = std::max(k.tail_max, std::abs(v[i]));
      v[i] = 0.0;
    }
  k.phi = GridFunctiond(-R, R, points, std::move(v));
  const auto mom = kernel_moments(k.phi, 0);
  if (std::abs(mom[0] - 1.0) > 1e-6) throw std::runtime_error("build_superkernel: quadrature resolution error");
  return k;
}

std::vector<double> kernel_moments(const GridFunctiond& phi, int max_order) {
  std::vector<double> out(max_order + 1, 0.0);
  const int n = phi.n();
  const double h = phi.spacing();
  for (int i = 0; i < n; ++i) {
    const double w = (i == 0 || i == n - 1) ? 0.5 * h : h;
    double xp = 1.0;
    for (int j = 0; j <= max_order; ++j) {
      out[j] += w * xp * phi[i];
      xp *= phi.x(i);
    }
  }
  return out;
}

double mollifier_deriv(int m, double x) {
  if (m < 0 || m > kMaxDeriv) throw std::invalid_argument("mollifier: derivative order out of range");
  return bump_raw(m, x) / bump_mass();
}

GridFunctiond build_mollifier(int points) {
  GridFunctiond::CallbackTable cb;
  for (int m = 1; m <= 4; ++m) cb[{m, 0}] = [m](double x, double) { return mollifier_deriv(m, x); };
  return GridFunctiond::sample(-1.0, 1.0, points, [](double x) { return mollifier_deriv(0, x); }, cb);
}

SmoothingKernel kernel_of(const SuperKernel& k) {
  SmoothingKernel s;
  s.deriv = [k](int m, double x) { return k.deriv(m, x); };
  s.support = k.support;
  s.max_deriv = kMaxDeriv;
  return s;
}

SmoothingKernel mollifier_kernel() {
  SmoothingKernel s;
  s.deriv = [](int m, double x) { return mollifier_deriv(m, x); };
  s.support = 1.0;
  s.max_deriv = 4;
  return s;
}

namespace {

// Discrete convolution F^{(m)}(x) = Σ_j c_j δ^{−1−m} K^{(m)}((x − x_j)/δ) on a grid refined by a
// factor r_m (f resampled by cubic interpolation). r_m is the smallest power of two at which the
// sampled moments Σ s (ds)^j K^{(m)}(ds), j ∈ {0, m}, have converged; without it, sharp kernels
// (the bump near ±1) alias and F^{(m)} at the nodes is meaningless.
struct SmoothCache {
  GridFunctiond f;
  std::function<double(int, double)> kd;
  double delta = 1, support = 1;
  std::array<std::once_flag, kMaxDeriv + 1> once;
  std::array<Eigen::VectorXd, kMaxDeriv + 1> table;
  std::array<int, kMaxDeriv + 1> refine{};
  std::mutex fine_mu;
  std::map<int, std::shared_ptr<const Eigen::VectorXd>> fine;  // trapezoid masses per factor

  static constexpr int kMaxRefine = 64;

  // (Σ s K^{(m)}(ds), Σ s (ds)^m K^{(m)}(ds)) at node spacing s = h / (r δ).
  std::pair<double, double> kernel_sums(int m, int r) const {
    const double s = f.spacing() / (r * delta);
    const int W = int(std::floor(support / s));
    double a = 0, b = 0;
    for (int d = -W; d <= W; ++d) {
      const double u = d * s, k = kd(m, u) * s;
      a += k;
      b += k * std::pow(u, m);
    }
    return {a, b};
  }

  // Smallest r whose sums agree with those at 2r to 1e−8 m!.
  int factor(int m) {
    if (refine[m] == 0) {
      const double tol = 1e-8 * std::tgamma(m + 1.0);
      int r = 1;
      auto cur = kernel_sums(m, r);
      while (r < kMaxRefine) {
        const auto next = kernel_sums(m, 2 * r);
        if (std::abs(cur.first - next.first) <= tol && std::abs(cur.second - next.second) <= tol) break;
        cur = next;
        r *= 2;
      }
      refine[m] = r;
    }
    return refine[m];
  }

  std::shared_ptr<const Eigen::VectorXd> masses(int r) {
    std::lock_guard<std::mutex> lk(fine_mu);
    auto it = fine.find(r);
    if (it != fine.end()) return it->second;
    const int nf = (f.n() - 1) * r + 1;
    const double hf = f.spacing() / r;
    auto c = std::make_shared<Eigen::VectorXd>(nf);
    for (int J = 0; J < nf; ++J)
      (*c)[J] = (J % r == 0 ? f[J / r] : interpolate(f, f.lo() + hf * J)) * hf;
    (*c)[0] *= 0.5;
    (*c)[nf - 1] *= 0.5;
    fine[r] = c;
    return c;
  }

  double sum_at(int m, double x, int r, const Eigen::VectorXd& c) const {
    const double hf = f.spacing() / r;
    const double reach = support * delta;
    const int nf = int(c.size());
    const int jlo = std::max(0, int(std::ceil((x - reach - f.lo()) / hf)));
    const int jhi = std::min(nf - 1, int(std::floor((x + reach - f.lo()) / hf)));
    double s = 0;
    for (int j = jlo; j <= jhi; ++j) s += c[j] * kd(m, (x - (f.lo() + hf * j)) / delta);
    return s * std::pow(delta, -1 - m);
  }

  Eigen::VectorXd convolve(int m) {
    const int r = factor(m);
    const auto c = masses(r);
    const double h = f.spacing(), hf = h / r;
    const int W = int(std::floor(support * delta / hf));
    const double scale = std::pow(delta, -1 - m);
    std::vector<double> kv(2 * W + 1);
    for (int d = -W; d <= W; ++d) kv[d + W] = kd(m, d * hf / delta) * scale;
    const int n = f.n(), nf = int(c->size());
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
      const int I = i * r;
      const int jlo = std::max(0, I - W), jhi = std::min(nf - 1, I + W);
      double s = 0;
      for (int j = jlo; j <= jhi; ++j) s += (*c)[j] * kv[I - j + W];
      v[i] = s;
    }
    return v;
  }

  double at(int m, double x) {
    const double u = (x - f.lo()) / f.spacing();
    const double r = std::round(u);
    if (std::abs(u - r) < 1e-9 && r >= 0 && r < f.n()) {
      std::call_once(once[m], [&] { table[m] = convolve(m); });
      return table[m][int(r)];
    }
    std::call_once(once[m], [&] { table[m] = convolve(m); });
    return sum_at(m, x, refine[m], *masses(refine[m]));
  }
};

}  // namespace

GridFunctiond smooth(const GridFunctiond& f, const SmoothingKernel& kernel, double delta, Warnings* warnings) {
  if (f.dim() != 1) throw std::invalid_argument("smooth: one-dimensional grids only");
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("smooth: delta must lie in (0, 1]");
  if (kernel.max_deriv > kMaxDeriv) throw std::invalid_argument("smooth: kernel derivative order too high");
  const int n = f.n();
  const double h = f.spacing();
  const int W = int(std::floor(kernel.support * delta / h));

  const double fmax = f.values().cwiseAbs().maxCoeff();
  for (int i = 0; i < n; ++i)
    if ((i <= W || i >= n - 1 - W) && std::abs(f[i]) > 1e-10 * fmax) {
      warn(warnings, "smooth: kernel window reaches the grid boundary where f carries mass");
      break;
    }

  auto cache = std::make_shared<SmoothCache>();
  cache->f = f.with_values(f.values());
  cache->kd = kernel.deriv;
  cache->delta = delta;
  cache->support = kernel.support;

  GridFunctiond::CallbackTable cb;
  for (int m = 1; m <= kernel.max_deriv; ++m)
    cb[{m, 0}] = [cache, m](double x, double) { return cache->at(m, x); };
  return GridFunctiond(f.lo(), f.hi(), n, cache->convolve(0), std::move(cb));
}

std::vector<RoughDensity> rough_test_family() {
  return {
      {"triangle", [](double x) { return std::max(0.0, 1.0 - std::abs(x)); }, 1, -3.0, 3.0},
      {"laplace", [](double x) { return 2.0 * std::exp(-4.0 * std::abs(x)); }, 1, -6.0, 6.0},
      {"epanechnikov", [](double x) { return std::abs(x) < 1.0 ? 0.75 * (1.0 - x * x) : 0.0; }, 1, -3.0, 3.0},
      {"uniform", [](double x) { return std::abs(x) < 0.5 ? 1.0 : 0.0; }, 0, -3.0, 3.0},
  };
}

namespace {

void check_deltas(const std::vector<double>& deltas) {
  if (deltas.size() < 3) throw std::invalid_argument("rate fit needs at least 3 points");
  for (double d : deltas)
    if (!(d > 0.0 && d <= 1.0)) throw std::invalid_argument("rate fit: delta must lie in (0, 1]");
}

}  // namespace

RateReport rate_kk2(const GridFunctiond& f, int q, int k, int l, const YoungFunction& e,
                    const std::vector<double>& deltas, const RateOptions& opt) {
  check_deltas(deltas);
  if (k < 0 || k > 3) throw std::invalid_argument("rate_kk2: k must lie in 0..3");
  static const SuperKernel sk = build_superkernel();
  const auto kern = kernel_of(sk);
  RateReport r;
  r.deltas = deltas;
  r.values.assign(deltas.size(), 0.0);
  parallel_for(long(deltas.size()), default_workers(), [&](long i) {
    const GridFunctiond fd = smooth(f, kern, deltas[i]);
    DkOptions o;
    o.max_nodes = opt.max_nodes;
    r.values[i] = dk_lp(GridDensity{f.with_values(f.values())}, GridDensity{fd.with_values(fd.values())}, k, o);
  });
  const double mass = f.values().cwiseAbs().sum() * f.spacing();
  const double fl = 3.0 * opt.floor * std::max(mass, 1e-300);
  std::vector<double> xs, ys;
  r.used.assign(deltas.size(), 0);
  for (size_t i = 0; i < deltas.size(); ++i)
    if (r.values[i] > fl) {
      r.used[i] = 1;
      xs.push_back(deltas[i]);
      ys.push_back(r.values[i]);
    }
  if (xs.size() < 3) throw std::runtime_error("rate_kk2: degenerate fit, distances at the LP floor");
  const auto fit = loglog_fit(xs, ys);
  r.slope = fit.slope;
  r.r2 = fit.r2;
  r.norm_f = sobolev_orlicz_norm(f, q, l, e);
  for (size_t i = 0; i < xs.size(); ++i)
    r.constant = std::max(r.constant, ys[i] / (r.norm_f * std::pow(xs[i], q + k)));
  return r;
}

RateReport rate_kk3(const GridFunctiond& f, int q, int n, int l, const YoungFunction& e,
                    const std::vector<double>& deltas) {
  check_deltas(deltas);
  if (n < q || n > kMaxDeriv) throw std::invalid_argument("rate_kk3: need q ≤ n ≤ 8");
  static const SuperKernel sk = build_superkernel();
  const auto kern = kernel_of(sk);
  RateReport r;
  r.deltas = deltas;
  r.values.assign(deltas.size(), 0.0);
  parallel_for(long(deltas.size()), default_workers(), [&](long i) {
    r.values[i] = sobolev_orlicz_norm(smooth(f, kern, deltas[i]), n, l, e);
  });
  std::vector<double> inv;
  for (double d : deltas) inv.push_back(1.0 / d);
  r.used.assign(deltas.size(), 1);
  const auto fit = loglog_fit(inv, r.values);
  r.slope = fit.slope;
  r.r2 = fit.r2;
  r.norm_f = sobolev_orlicz_norm(f, q, l, e);
  for (size_t i = 0; i < deltas.size(); ++i)
    r.constant = std::max(r.constant, r.values[i] / (r.norm_f * std::pow(deltas[i], -(n - q))));
  return r;
}

}  // namespace regint
