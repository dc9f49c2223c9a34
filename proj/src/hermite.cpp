#include "regint/hermite.hpp"

#include "regint/fit.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace regint {

namespace {

const double kPiQuarter = std::pow(std::numbers::pi, -0.25);
constexpr double kBig = 1e150;
const double kLogBig = std::log(kBig);

}  // namespace

double hermite_fn(int n, double t) {
  if (n < 0 || n > 1024) throw std::out_of_range("hermite_fn: degree out of range");
  // Recurrence on the polynomial part with a running log scale, so neither
  // e^{-t²/2} underflow nor polynomial growth loses the value.
  double log_scale = -0.5 * t * t;
  double prev = 0.0, cur = kPiQuarter;
  for (int k = 0; k < n; ++k) {
    const double next = t * std::sqrt(2.0 / (k + 1)) * cur - std::sqrt(double(k) / (k + 1)) * prev;
    prev = cur;
    cur = next;
    if (std::abs(cur) > kBig) {
      cur /= kBig;
      prev /= kBig;
      log_scale += kLogBig;
    }
  }
  return cur * std::exp(log_scale);
}

Eigen::MatrixXd hermite_table(int nmax, const Eigen::VectorXd& t) {
  if (nmax < 0 || nmax > 16383) throw std::out_of_range("hermite_table: degree out of range");
  Eigen::MatrixXd H(nmax + 1, t.size());
  std::vector<double> a(nmax + 1), b(nmax + 1);
  for (int k = 0; k < nmax; ++k) {
    a[k] = std::sqrt(2.0 / (k + 1));
    b[k] = std::sqrt(double(k) / (k + 1));
  }
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    const double ti = t[i];
    double log_scale = -0.5 * ti * ti;
    double prev = 0.0, cur = kPiQuarter;
    double factor = std::exp(log_scale);
    H(0, i) = cur * factor;
    for (int k = 0; k < nmax; ++k) {
      const double next = ti * a[k] * cur - b[k] * prev;
      prev = cur;
      cur = next;
      if (std::abs(cur) > kBig) {
        cur /= kBig;
        prev /= kBig;
        log_scale += kLogBig;
        factor = std::exp(log_scale);
      }
      H(k + 1, i) = cur * factor;
    }
  }
  return H;
}

Eigen::VectorXd hermite_coeff_derivative(const Eigen::VectorXd& c) {
  const Eigen::Index n = c.size();
  Eigen::VectorXd d = Eigen::VectorXd::Zero(n + 1);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (j > 0) d[j - 1] += std::sqrt(double(j) / 2.0) * c[j];
    d[j + 1] -= std::sqrt(double(j + 1) / 2.0) * c[j];
  }
  return d;
}

// ---------------------------------------------------------------------------

GaussHermiteRule gauss_hermite(int order) {
  if (order < 1 || order > 400) throw std::out_of_range("gauss_hermite: order must be in [1, 400]");
  const int n = order;
  // Roots of h_n: scan for sign changes on [0, √(2n+1) + 1], then refine by
  // Newton steps safeguarded with bisection. h_n' = √(2n) h_{n−1} − t h_n.
  auto hn = [n](double t) { return hermite_fn(n, t); };
  std::vector<double> pos;
  if (n % 2 == 1) pos.push_back(0.0);
  const double tmax = std::sqrt(2.0 * n + 1.0) + 1.0;
  const double step = std::numbers::pi / std::sqrt(2.0 * n + 1.0) / 40.0;
  double a = n % 2 == 1 ? 0.5 * step : 0.0;
  double fa = hn(a);
  while (a < tmax && int(pos.size()) < (n + 1) / 2) {
    const double b = a + step;
    const double fb = hn(b);
    if (fa == 0.0 && a > 0.0) {
      pos.push_back(a);
    } else if ((fa < 0.0) != (fb < 0.0) && fb != 0.0) {
      double lo = a, hi = b, flo = fa;
      double z = 0.5 * (lo + hi);
      for (int it = 0; it < 100; ++it) {
        const double fz = hn(z);
        if (fz == 0.0) break;
        if ((fz < 0.0) == (flo < 0.0)) {
          lo = z;
          flo = fz;
        } else {
          hi = z;
        }
        const double dz = std::sqrt(2.0 * n) * hermite_fn(n - 1, z) - z * fz;
        double zn = z - fz / dz;
        if (!(zn > lo && zn < hi)) zn = 0.5 * (lo + hi);
        if (std::abs(zn - z) <= 1e-16 * std::max(1.0, z)) {
          z = zn;
          break;
        }
        z = zn;
      }
      pos.push_back(z);
    }
    a = b;
    fa = fb;
  }
  if (int(pos.size()) != (n + 1) / 2) throw std::runtime_error("gauss_hermite: root scan failed");
  GaussHermiteRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  r.hweights.resize(n);
  for (int i = 0; i < int(pos.size()); ++i) {
    const double z = pos[i];
    const double h = hermite_fn(n - 1, z);
    const double hw = 1.0 / (double(n) * h * h);
    // ascending order: negative roots first
    const int ip = n / 2 + i;            // index of +z
    const int im = (n - 1) / 2 - i;      // index of −z
    r.nodes[ip] = z;
    r.nodes[im] = -z;
    r.hweights[ip] = r.hweights[im] = hw;
    r.weights[ip] = r.weights[im] = hw * std::exp(-z * z);
  }
  return r;
}

Eigen::MatrixXd orthonormality_matrix(int nmax, int order) {
  const auto rule = gauss_hermite(order);
  const Eigen::MatrixXd H = hermite_table(nmax, rule.nodes);
  return H * rule.hweights.asDiagonal() * H.transpose();
}

// ---------------------------------------------------------------------------

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

double BumpA::operator()(double t) const {
  if (t <= 0.25 || t >= 4.0) return 0.0;
  if (t <= 1.0) return smooth_step((t - 0.25) / 0.75);
  return 1.0 - smooth_step((t / 4.0 - 0.25) / 0.75);
}

int BandKernel::jmin() const { return n == 0 ? 1 : (1 << (2 * (n - 1))) + 1; }

int BandKernel::jmax() const { return (1 << (2 * (n + 1))) - 1; }

Eigen::VectorXd BandKernel::weights() const {
  const double s = std::ldexp(1.0, 2 * n);
  Eigen::VectorXd w(jmax() + 1);
  for (int j = 0; j <= jmax(); ++j) w[j] = a(j / s);
  return w;
}

namespace {

void check_band(const BandKernel& bk) {
  if (bk.n < 0 || bk.n > 6) throw std::out_of_range("band kernel: band index must be in [0, 6]");
}

}  // namespace

double band_kernel_eval(const BandKernel& bk, double x, double y) {
  check_band(bk);
  // Fixed argument order keeps the kernel bitwise symmetric.
  Eigen::VectorXd t(2);
  t << std::min(x, y), std::max(x, y);
  const Eigen::MatrixXd H = hermite_table(bk.jmax(), t);
  const Eigen::VectorXd w = bk.weights();
  double s = 0.0;
  for (int j = bk.jmin(); j <= bk.jmax(); ++j) s += w[j] * H(j, 0) * H(j, 1);
  return s;
}

Eigen::MatrixXd band_kernel_matrix(const BandKernel& bk, const Eigen::VectorXd& xs,
                                   const Eigen::VectorXd& ys, int alpha) {
  check_band(bk);
  const int J = bk.jmax();
  const Eigen::VectorXd w = bk.weights();
  const Eigen::MatrixXd Hy = hermite_table(J, ys);
  const Eigen::MatrixXd Hx = hermite_table(J + alpha, xs);
  // ∂^α h_j expressed in h_0..h_{j+α}: D is (J+α+1) × (J+1).
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(J + alpha + 1, J + 1);
  for (int j = 0; j <= J; ++j) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(j + 1);
    c[j] = 1.0;
    for (int a = 0; a < alpha; ++a) c = hermite_coeff_derivative(c);
    D.col(j).head(c.size()) = c;
  }
  const Eigen::MatrixXd dHx = D.transpose() * Hx;  // (J+1) × nx
  return dHx.transpose() * w.asDiagonal() * Hy;
}

Eigen::VectorXd hermite_coefficients(const GridFunctiond& f, int jmax) {
  if (f.dim() != 1) throw std::invalid_argument("hermite_coefficients: d = 1 only");
  Eigen::VectorXd xs(f.n());
  for (int i = 0; i < f.n(); ++i) xs[i] = f.x(i);
  const Eigen::MatrixXd H = hermite_table(jmax, xs);
  Eigen::VectorXd wf = f.values() * f.spacing();
  wf[0] *= 0.5;
  wf[f.n() - 1] *= 0.5;
  return H * wf;
}

namespace {

GridFunctiond expand(const GridFunctiond& f, Eigen::VectorXd coeff, int alpha) {
  for (int a = 0; a < alpha; ++a) coeff = hermite_coeff_derivative(coeff);
  Eigen::VectorXd xs(f.n());
  for (int i = 0; i < f.n(); ++i) xs[i] = f.x(i);
  const Eigen::MatrixXd H = hermite_table(int(coeff.size()) - 1, xs);
  return f.with_values(H.transpose() * coeff);
}

}  // namespace

GridFunctiond band_project(const BandKernel& bk, const GridFunctiond& f, Warnings* warnings, int alpha) {
  check_band(bk);
  if (!decays_at_boundary(f, 1e-9)) warn(warnings, "band_project: f does not decay at the box boundary");
  const Eigen::VectorXd c = hermite_coefficients(f, bk.jmax());
  return expand(f, c.cwiseProduct(bk.weights()), alpha);
}

GridFunctiond reconstruct(const GridFunctiond& f, int N, Warnings* warnings) {
  if (N < 0 || N > 5) throw std::out_of_range("reconstruct: N must be in [0, 5]");
  if (!decays_at_boundary(f, 1e-9)) warn(warnings, "reconstruct: f does not decay at the box boundary");
  const BandKernel top{N};
  const int J = top.jmax();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(J + 1);
  w[0] = 1.0;  // J_0 f = ⟨f, h_0⟩ h_0
  for (int n = 0; n <= N; ++n) {
    const BandKernel bk{n};
    const Eigen::VectorXd wn = bk.weights();
    w.head(wn.size()) += wn;
  }
  const Eigen::VectorXd c = hermite_coefficients(f, J);
  return expand(f, c.cwiseProduct(w), 0);
}

double eigen_check(int alpha) {
  if (alpha < 0 || alpha > 30) throw std::out_of_range("eigen_check: alpha must be in [0, 30]");
  const int points = 4001;
  Eigen::VectorXd xs = Eigen::VectorXd::LinSpaced(points, -6.0, 6.0);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(alpha + 1);
  c[alpha] = 1.0;
  const Eigen::VectorXd c2 = hermite_coeff_derivative(hermite_coeff_derivative(c));
  const Eigen::MatrixXd H = hermite_table(alpha + 2, xs);
  const Eigen::VectorXd f = H.row(alpha).transpose();
  const Eigen::VectorXd f2 = H.transpose() * c2;
  double r = 0.0;
  for (int i = 0; i < points; ++i)
    r = std::max(r, std::abs(-f2[i] + xs[i] * xs[i] * f[i] - (2.0 * alpha + 1.0) * f[i]));
  return r;
}

// ---------------------------------------------------------------------------

BandBoundsRow band_operator_bounds(const BandKernel& bk, const GridFunctiond& f, int alpha, int m,
                                   int k, const YoungFunction& e) {
  BandBoundsRow row;
  row.n = bk.n;
  const GridFunctiond p = band_project(bk, f, nullptr, alpha);
  const GridFunctiond q = band_project(bk, derivative(f, {alpha, 0}));
  row.proj_e = luxembourg_norm(p, e);
  row.proj_sup = lp_norm(p, std::numeric_limits<double>::infinity());
  row.proj_deriv_e = luxembourg_norm(q, e);
  const double two_n = std::ldexp(1.0, bk.n);
  const double fe = luxembourg_norm(f, e);
  if (fe == 0.0) return row;
  row.scale_a = std::pow(two_n, alpha) * fe;
  row.scale_b = std::pow(two_n, alpha) * beta(e, two_n) * luxembourg_norm(f, conjugate(e));
  row.scale_4 = sobolev_orlicz_norm(f, 2 * m + alpha, 2 * m, e) / std::pow(4.0, bk.n * m);
  row.scale_5 = std::pow(two_n, alpha + k) * beta(e, two_n);
  row.const_a = row.proj_e / row.scale_a;
  row.const_b = row.proj_sup / row.scale_b;
  row.const_4 = row.proj_deriv_e / row.scale_4;
  return row;
}

namespace {

// max_n C(n) / C(n_min): how far the constant must grow beyond its first value.
double growth(const std::vector<double>& c) {
  if (c.empty() || c.front() <= 0.0) return c.empty() ? 1.0 : std::numeric_limits<double>::infinity();
  double g = 1.0;
  for (double v : c) g = std::max(g, v / c.front());
  return g;
}

}  // namespace

BandBoundsSweep band_operator_sweep(const GridFunctiond& f, int alpha, int m, int k,
                                    const YoungFunction& e, int nmin, int nmax) {
  BandBoundsSweep s;
  std::vector<double> ca, cb, c4;
  for (int n = nmin; n <= nmax; ++n) {
    s.rows.push_back(band_operator_bounds(BandKernel{n}, f, alpha, m, k, e));
    ca.push_back(s.rows.back().const_a);
    cb.push_back(s.rows.back().const_b);
    c4.push_back(s.rows.back().const_4);
  }
  s.spread_a = spread(ca);
  s.spread_b = spread(cb);
  s.spread_4 = spread(c4);
  s.growth_a = growth(ca);
  s.growth_b = growth(cb);
  s.growth_4 = growth(c4);
  return s;
}

KernelDecayReport kernel_decay(int alpha, int k, const std::vector<int>& bands, double L, int points) {
  KernelDecayReport r;
  const Eigen::VectorXd xs = Eigen::VectorXd::LinSpaced(points, -L, L);
  std::vector<double> ns, lg;
  for (int n : bands) {
    const Eigen::MatrixXd K = band_kernel_matrix(BandKernel{n}, xs, xs, alpha);
    const double two_n = std::ldexp(1.0, n);
    double sup = 0.0, c = 0.0;
    for (int i = 0; i < points; ++i)
      for (int j = 0; j < points; ++j) {
        const double v = std::abs(K(i, j));
        sup = std::max(sup, v);
        const double dist = 1.0 + two_n * std::abs(xs[i] - xs[j]);
        c = std::max(c, v * std::pow(dist, k) / std::pow(two_n, alpha + 1));
      }
    r.bands.push_back(n);
    r.sup_abs.push_back(sup);
    r.decay_c.push_back(c);
    ns.push_back(n);
    lg.push_back(std::log2(sup));
  }
  if (bands.size() >= 2) r.slope = linear_fit(ns, lg).slope;
  return r;
}

}  // namespace regint
