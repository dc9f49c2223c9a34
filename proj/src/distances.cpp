#include "regint/distances.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace regint {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double std_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
double std_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

// ∫_a^b dN(m, s²) and ∫_a^b x dN(m, s²).
void partial_moments(double m, double s, double a, double b, double& p0, double& p1) {
  const double za = (a - m) / s, zb = (b - m) / s;
  p0 = std_cdf(zb) - std_cdf(za);
  p1 = m * p0 - s * (std_pdf(zb) - std_pdf(za));
}

std::vector<double> trapezoid_weights(const GridFunctiond& f) {
  const int n = f.n(0);
  std::vector<double> w(n, f.spacing(0));
  w.front() *= 0.5;
  w.back() *= 0.5;
  return w;
}

const GridFunctiond& grid_of(const GridDensity& g) {
  if (g.f.dim() != 1) throw std::invalid_argument("distances: grid densities must be one-dimensional");
  return g.f;
}

struct NodeMass {
  double x;
  double w;
};

std::vector<NodeMass> merge_nodes(std::vector<NodeMass> v) {
  std::sort(v.begin(), v.end(), [](const NodeMass& a, const NodeMass& b) { return a.x < b.x; });
  std::vector<NodeMass> out;
  for (const auto& p : v) {
    if (!out.empty() && std::abs(p.x - out.back().x) <= 1e-12 * (1.0 + std::abs(p.x)))
      out.back().w += p.w;
    else
      out.push_back(p);
  }
  return out;
}

// Keeps at most max_nodes nodes; every dropped node's mass goes to its two kept
// neighbours with linear weights, which preserves total mass and first moment.
std::vector<NodeMass> compress(const std::vector<NodeMass>& v, int max_nodes) {
  const int n = int(v.size());
  if (n <= max_nodes) return v;
  double wmax = 0;
  for (const auto& p : v) wmax = std::max(wmax, std::abs(p.w));
  std::vector<char> sig(n, 0);
  for (int i = 0; i < n; ++i)
    if (std::abs(v[i].w) > 1e-10 * wmax)
      for (int d = -1; d <= 1; ++d)
        if (i + d >= 0 && i + d < n) sig[i + d] = 1;
  std::vector<int> sidx;
  for (int i = 0; i < n; ++i)
    if (sig[i]) sidx.push_back(i);
  const int budget = std::max(2, max_nodes - 4);
  const int stride = std::max(1, int(std::ceil(double(sidx.size()) / budget)));
  std::vector<char> keep(n, 0);
  keep[0] = keep[n - 1] = 1;
  for (size_t t = 0; t < sidx.size(); t += stride) keep[sidx[t]] = 1;
  if (!sidx.empty()) keep[sidx.front()] = keep[sidx.back()] = 1;

  std::vector<int> kept;
  for (int i = 0; i < n; ++i)
    if (keep[i]) kept.push_back(i);
  std::vector<NodeMass> out;
  out.reserve(kept.size());
  for (int i : kept) out.push_back({v[i].x, v[i].w});
  size_t seg = 0;
  for (int i = 0; i < n; ++i) {
    if (keep[i]) continue;
    while (kept[seg + 1] < i) ++seg;
    const int a = kept[seg], b = kept[seg + 1];
    const double t = (v[i].x - v[a].x) / (v[b].x - v[a].x);
    out[seg].w += (1.0 - t) * v[i].w;
    out[seg + 1].w += t * v[i].w;
  }
  return out;
}

double factorial(int j) {
  double r = 1;
  for (int i = 2; i <= j; ++i) r *= i;
  return r;
}

}  // namespace

double mixture_pdf(const GaussMix& g, double x) {
  double s = 0;
  for (const auto& c : g.components) {
    const double sd = std::sqrt(c.variance);
    s += c.weight * std_pdf((x - c.mean) / sd) / sd;
  }
  return s;
}

double mixture_cdf(const GaussMix& g, double x) {
  double s = 0;
  for (const auto& c : g.components) s += c.weight * std_cdf((x - c.mean) / std::sqrt(c.variance));
  return s;
}

namespace {

void mixture_range(const GaussMix& g, double& lo, double& hi) {
  lo = std::numeric_limits<double>::infinity();
  hi = -lo;
  for (const auto& c : g.components) {
    const double sd = std::sqrt(c.variance);
    lo = std::min(lo, c.mean - 10.0 * sd);
    hi = std::max(hi, c.mean + 10.0 * sd);
  }
}

}  // namespace

void discretize(const MeasureRep& mu, std::vector<double>& nodes, std::vector<double>& masses,
                int mixture_points) {
  nodes.clear();
  masses.clear();
  if (const auto* g = std::get_if<GridDensity>(&mu)) {
    const auto& f = grid_of(*g);
    const auto tw = trapezoid_weights(f);
    for (int i = 0; i < f.n(0); ++i) {
      nodes.push_back(f.coord(0, i));
      masses.push_back(tw[i] * f[i]);
    }
  } else if (const auto* s = std::get_if<Samples>(&mu)) {
    if (s->w.size() != s->x.size()) throw std::invalid_argument("discretize: sample weights size mismatch");
    nodes = s->x;
    masses = s->w;
  } else {
    const auto& gm = std::get<GaussMix>(mu);
    if (gm.components.empty()) throw std::invalid_argument("discretize: empty mixture");
    if (mixture_points < 3) throw std::invalid_argument("discretize: need three or more mixture points");
    double lo, hi;
    mixture_range(gm, lo, hi);
    const int M = mixture_points;
    const double h = (hi - lo) / (M - 1);
    nodes.resize(M);
    masses.assign(M, 0.0);
    for (int i = 0; i < M; ++i) nodes[i] = lo + h * i;
    for (const auto& c : gm.components) {
      const double sd = std::sqrt(c.variance);
      for (int i = 0; i + 1 < M; ++i) {
        double p0, p1;
        partial_moments(c.mean, sd, nodes[i], nodes[i + 1], p0, p1);
        const double up = (p1 - nodes[i] * p0) / h;  // ∫ (x − x_i)/h
        masses[i] += c.weight * (p0 - up);
        masses[i + 1] += c.weight * up;
      }
      masses.front() += c.weight * std_cdf((lo - c.mean) / sd);
      masses.back() += c.weight * (1.0 - std_cdf((hi - c.mean) / sd));
    }
  }
}

DkProblem make_dk_problem(const MeasureRep& mu, const MeasureRep& nu, int k, const DkOptions& opt) {
  if (k < 0 || k > 3) throw std::invalid_argument("dk: k must lie in 0..3");
  std::vector<double> xa, ma, xb, mb;
  discretize(mu, xa, ma, opt.mixture_points);
  discretize(nu, xb, mb, opt.mixture_points);
  std::vector<NodeMass> v;
  v.reserve(xa.size() + xb.size());
  for (size_t i = 0; i < xa.size(); ++i) v.push_back({xa[i], ma[i]});
  for (size_t i = 0; i < xb.size(); ++i) v.push_back({xb[i], -mb[i]});
  auto merged = compress(merge_nodes(std::move(v)), std::max(opt.max_nodes, k + 2));
  DkProblem p;
  p.k = k;
  for (const auto& q : merged) {
    p.nodes.push_back(q.x);
    p.w.push_back(q.w);
  }
  return p;
}

Eigen::MatrixXd difference_operator(const std::vector<double>& x, int j) {
  const int n = int(x.size());
  const int rows = std::max(0, n - j);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(rows, n);
  const double fj = factorial(j);
  for (int r = 0; r < rows; ++r)
    for (int i = r; i <= r + j; ++i) {
      double den = 1;
      for (int l = r; l <= r + j; ++l)
        if (l != i) den *= x[i] - x[l];
      D(r, i) = fj / den;
    }
  return D;
}

LinearProgram dk_linear_program(const DkProblem& p) {
  const int n = int(p.nodes.size());
  const int k = p.k;
  std::vector<Eigen::MatrixXd> D;
  int nv = 0;
  for (int j = 0; j <= k; ++j) {
    D.push_back(difference_operator(p.nodes, j));
    nv += int(D.back().rows());
  }
  const int cols = 2 * nv + 1 + (k + 1);
  const int rows = n + (k + 1);
  const int s_col = 2 * nv;
  LinearProgram lp;
  lp.A = Eigen::MatrixXd::Zero(rows, cols);
  lp.b = Eigen::VectorXd::Zero(rows);
  lp.c = Eigen::VectorXd::Zero(cols);
  lp.c[s_col] = 1.0;
  lp.initial_basis = Eigen::VectorXi::Constant(rows, -1);
  for (int i = 0; i < n; ++i) lp.b[i] = p.w[i];

  int col = 0;
  for (int j = 0; j <= k; ++j) {
    for (int r = 0; r < D[j].rows(); ++r) {
      // v = sc·u keeps every constraint column at unit max-norm.
      const double sc = 1.0 / D[j].row(r).cwiseAbs().maxCoeff();
      for (int i = 0; i < n; ++i) {
        const double a = D[j](r, i) * sc;
        if (a == 0.0) continue;
        lp.A(i, col) = a;
        lp.A(i, col + 1) = -a;
      }
      lp.A(n + j, col) = sc;
      lp.A(n + j, col + 1) = sc;
      col += 2;
    }
    lp.A(n + j, s_col) = -1.0;
    lp.A(n + j, s_col + 1 + j) = 1.0;
    lp.initial_basis[n + j] = s_col + 1 + j;
  }
  return lp;
}

double dk_lp(const DkProblem& p) {
  if (p.k < 0 || p.k > 3) throw std::invalid_argument("dk: k must lie in 0..3");
  if (p.nodes.size() != p.w.size()) throw std::invalid_argument("dk: nodes and weights differ in size");
  double norm1 = 0;
  for (double x : p.w) norm1 += std::abs(x);
  if (norm1 == 0.0) return 0.0;
  DkProblem q = p;
  for (double& x : q.w) x /= norm1;
  const auto res = solve_lp(dk_linear_program(q));
  if (res.status != LpStatus::optimal)
    throw std::runtime_error("dk_lp: internal LP failure (status " + std::to_string(int(res.status)) + ")");
  return std::max(0.0, res.objective) * norm1;
}

double dk_lp(const MeasureRep& mu, const MeasureRep& nu, int k, const DkOptions& opt) {
  return dk_lp(make_dk_problem(mu, nu, k, opt));
}

double tv_distance(const MeasureRep& mu, const MeasureRep& nu) {
  if (mu.index() != nu.index()) throw std::invalid_argument("tv_distance: mixed representations; convert first");
  if (const auto* a = std::get_if<GridDensity>(&mu)) {
    const auto& f = grid_of(*a);
    const auto& g = grid_of(std::get<GridDensity>(nu));
    if (!f.same_grid(g)) throw std::invalid_argument("tv_distance: grid densities must share a grid");
    const auto tw = trapezoid_weights(f);
    double s = 0;
    for (int i = 0; i < f.n(0); ++i) s += tw[i] * std::abs(f[i] - g[i]);
    return s;
  }
  if (std::holds_alternative<Samples>(mu)) {
    std::vector<double> x, w;
    std::vector<NodeMass> v;
    discretize(mu, x, w);
    for (size_t i = 0; i < x.size(); ++i) v.push_back({x[i], w[i]});
    discretize(nu, x, w);
    for (size_t i = 0; i < x.size(); ++i) v.push_back({x[i], -w[i]});
    double s = 0;
    for (const auto& q : merge_nodes(std::move(v))) s += std::abs(q.w);
    return s;
  }
  const auto& ga = std::get<GaussMix>(mu);
  const auto& gb = std::get<GaussMix>(nu);
  double lo, hi, lo2, hi2;
  mixture_range(ga, lo, hi);
  mixture_range(gb, lo2, hi2);
  lo = std::min(lo, lo2);
  hi = std::max(hi, hi2);
  const int M = 40001;
  const double h = (hi - lo) / (M - 1);
  double s = 0;
  for (int i = 0; i < M; ++i) {
    const double x = lo + h * i;
    const double wt = (i == 0 || i == M - 1) ? 0.5 : 1.0;
    s += wt * std::abs(mixture_pdf(ga, x) - mixture_pdf(gb, x));
  }
  return s * h;
}

namespace {

struct CdfEval {
  double lo, hi;
  std::function<double(double)> F;
};

CdfEval make_cdf(const MeasureRep& mu) {
  if (const auto* g = std::get_if<GridDensity>(&mu)) {
    const auto& f = grid_of(*g);
    const int n = f.n(0);
    const double h = f.spacing(0);
    std::vector<double> cum(n, 0.0);
    for (int i = 1; i < n; ++i) cum[i] = cum[i - 1] + 0.5 * h * (f[i - 1] + f[i]);
    const double lo = f.lo(0);
    return {lo, f.hi(0), [cum, lo, h, n, f](double x) {
              if (x <= lo) return 0.0;
              const double u = (x - lo) / h;
              const int i = int(std::floor(u));
              if (i >= n - 1) return cum.back();
              // Exact integral of the linear interpolant over [x_i, x].
              const double t = u - i;
              return cum[i] + h * (f[i] * t + 0.5 * (f[i + 1] - f[i]) * t * t);
            }};
  }
  if (const auto* s = std::get_if<Samples>(&mu)) {
    std::vector<std::pair<double, double>> a;
    for (size_t i = 0; i < s->x.size(); ++i) a.emplace_back(s->x[i], s->w[i]);
    std::sort(a.begin(), a.end());
    std::vector<double> xs, cum;
    double c = 0;
    for (const auto& [x, w] : a) {
      c += w;
      xs.push_back(x);
      cum.push_back(c);
    }
    const double lo = xs.empty() ? 0.0 : xs.front();
    const double hi = xs.empty() ? 0.0 : xs.back();
    return {lo, hi, [xs, cum](double x) {
              const auto it = std::upper_bound(xs.begin(), xs.end(), x);
              return it == xs.begin() ? 0.0 : cum[size_t(it - xs.begin()) - 1];
            }};
  }
  const auto gm = std::get<GaussMix>(mu);
  double lo, hi;
  mixture_range(gm, lo, hi);
  return {lo, hi, [gm](double x) { return mixture_cdf(gm, x); }};
}

}  // namespace

double wasserstein1_1d(const MeasureRep& mu, const MeasureRep& nu) {
  const double ma = total_mass(mu), mb = total_mass(nu);
  if (std::abs(ma - mb) > 1e-6 * std::max(1.0, std::abs(ma)))
    throw std::invalid_argument("wasserstein1_1d: mass mismatch");
  if (std::holds_alternative<Samples>(mu) && std::holds_alternative<Samples>(nu)) {
    std::vector<double> x, w;
    std::vector<NodeMass> v;
    discretize(mu, x, w);
    for (size_t i = 0; i < x.size(); ++i) v.push_back({x[i], w[i]});
    discretize(nu, x, w);
    for (size_t i = 0; i < x.size(); ++i) v.push_back({x[i], -w[i]});
    const auto m = merge_nodes(std::move(v));
    double c = 0, s = 0;
    for (size_t i = 0; i + 1 < m.size(); ++i) {
      c += m[i].w;
      s += std::abs(c) * (m[i + 1].x - m[i].x);
    }
    return s;
  }
  const auto A = make_cdf(mu), B = make_cdf(nu);
  const double lo = std::min(A.lo, B.lo), hi = std::max(A.hi, B.hi);
  if (!(hi > lo)) return 0.0;
  const int M = 200001;
  const double h = (hi - lo) / (M - 1);
  double s = 0;
  for (int i = 0; i < M; ++i) {
    const double x = lo + h * i;
    const double wt = (i == 0 || i == M - 1) ? 0.5 : 1.0;
    s += wt * std::abs(A.F(x) - B.F(x));
  }
  return s * h;
}

namespace {

struct BruteForce {
  const DkProblem& p;
  int n, k, levels;
  double step;
  std::vector<double> phi;
  std::vector<std::vector<double>> dd;  // dd[j][r] = [x_r..x_{r+j}] φ
  std::vector<double> fact;
  std::vector<double> tail_abs;  // Σ_{l ≥ i} |w_l|
  double best = -std::numeric_limits<double>::infinity();

  explicit BruteForce(const DkProblem& prob, double st) : p(prob), step(st) {
    n = int(p.nodes.size());
    k = p.k;
    levels = int(std::floor(1.0 / step + 1e-9));
    phi.assign(n, 0.0);
    dd.assign(k + 1, std::vector<double>(n, 0.0));
    fact.assign(k + 1, 1.0);
    for (int j = 1; j <= k; ++j) fact[j] = fact[j - 1] * j;
    tail_abs.assign(n + 1, 0.0);
    for (int i = n - 1; i >= 0; --i) tail_abs[i] = tail_abs[i + 1] + std::abs(p.w[i]);
  }

  void search(int i, double value, const std::vector<double>& maxes) {
    double used = 0;
    for (int j = 1; j <= k; ++j) used += maxes[j];
    const double cap = std::max(0.0, 1.0 - used);
    if (value + cap * tail_abs[i] <= best + 1e-15) return;
    if (i == n) {
      best = std::max(best, value);
      return;
    }
    const int up = p.w[i] >= 0 ? 1 : -1;
    for (int t = 0; t <= 2 * levels; ++t) {
      // Visit values starting from the sign that helps the objective.
      const int idx = up * (levels - t);
      const double v = idx * step;
      phi[i] = v;
      dd[0][i] = v;
      std::vector<double> mx = maxes;
      mx[0] = std::max(mx[0], std::abs(v));
      bool ok = true;
      double sum = 0;
      for (int j = 1; j <= std::min(k, i); ++j) {
        const int r = i - j;
        dd[j][r] = (dd[j - 1][r + 1] - dd[j - 1][r]) / (p.nodes[r + j] - p.nodes[r]);
        mx[j] = std::max(mx[j], fact[j] * std::abs(dd[j][r]));
      }
      for (int j = 0; j <= k; ++j) sum += mx[j];
      if (sum > 1.0 + 1e-12) ok = false;
      if (ok) search(i + 1, value + v * p.w[i], mx);
    }
  }
};

}  // namespace

double dk_bruteforce(const DkProblem& p, double step) {
  if (p.nodes.size() > 8) throw std::invalid_argument("dk_bruteforce: support too large");
  if (!(step > 0.0 && step <= 1.0)) throw std::invalid_argument("dk_bruteforce: step must lie in (0, 1]");
  BruteForce bf(p, step);
  bf.search(0, 0.0, std::vector<double>(p.k + 1, 0.0));
  return std::max(0.0, bf.best);
}

std::string dump_dk_problem(const DkProblem& p) {
  std::ostringstream os;
  os.precision(17);
  os << "k " << p.k << "\nnodes " << p.nodes.size() << "\n";
  for (size_t i = 0; i < p.nodes.size(); ++i) os << p.nodes[i] << " " << p.w[i] << "\n";
  os << dump_lp(dk_linear_program(p));
  return os.str();
}

}  // namespace regint
