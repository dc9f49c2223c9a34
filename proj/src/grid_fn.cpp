#include "regint/grid_fn.hpp"

#include <json.hpp>

#include <algorithm>
#include <iomanip>
#include <limits>
#include <sstream>

namespace regint {

Eigen::VectorXd fd_weights(double x0, const Eigen::VectorXd& nodes, int m) {
  // Fornberg (1988), generation of finite difference formulas on arbitrary grids.
  const int n = int(nodes.size());
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, m + 1);
  double c1 = 1.0;
  double c4 = nodes[0] - x0;
  c(0, 0) = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c(i, k) = c1 * (k * c(i - 1, k - 1) - c5 * c(i - 1, k)) / c2;
        c(i, 0) = -c1 * c5 * c(i - 1, 0) / c2;
      }
      for (int k = mn; k >= 1; --k) c(j, k) = (c4 * c(j, k) - k * c(j, k - 1)) / c3;
      c(j, 0) = c4 * c(j, 0) / c3;
    }
    c1 = c2;
  }
  return c.col(m);
}

namespace {

// m-th derivative of equally spaced samples v (stride s, count n, spacing h).
void fd_line(const double* in, double* out, int n, int stride, double h, int m) {
  if (m == 0) {
    for (int i = 0; i < n; ++i) out[i * stride] = in[i * stride];
    return;
  }
  const int r = (m + 1) / 2 + 1;
  const int central = 2 * r + 1;
  const int edge = std::max(central, m + 4);
  if (n < edge) throw std::invalid_argument("derivative: grid too small for stencil");
  // interior weights
  Eigen::VectorXd nodes(central);
  for (int k = 0; k < central; ++k) nodes[k] = k - r;
  const Eigen::VectorXd wc = fd_weights(0.0, nodes, m);
  const double scale = std::pow(h, -m);
  Eigen::VectorXd enodes(edge);
  for (int k = 0; k < edge; ++k) enodes[k] = k;
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    if (i >= r && i + r < n) {
      for (int k = 0; k < central; ++k) s += wc[k] * in[(i - r + k) * stride];
    } else {
      const int start = (i < r) ? 0 : n - edge;
      const Eigen::VectorXd w = fd_weights(double(i - start), enodes, m);
      for (int k = 0; k < edge; ++k) s += w[k] * in[(start + k) * stride];
    }
    out[i * stride] = s * scale;
  }
}

}  // namespace

GridFunctiond derivative(const GridFunctiond& f, const MultiIndex& alpha) {
  const MultiIndex a = f.dim() == 1 ? MultiIndex{alpha[0], 0} : alpha;
  if (a[0] < 0 || a[1] < 0) throw std::invalid_argument("derivative: negative multi-index");
  if (order(a) == 0) return f;

  // Callbacks for ∂_β f with β ≥ α become callbacks of the result at β − α.
  GridFunctiond::CallbackTable shifted;
  for (const auto& [beta, cb] : f.analytic_derivs())
    if (beta[0] >= a[0] && beta[1] >= a[1]) shifted[{beta[0] - a[0], beta[1] - a[1]}] = cb;

  auto it = f.analytic_derivs().find(a);
  if (it != f.analytic_derivs().end()) {
    Eigen::VectorXd v(f.size());
    if (f.dim() == 1) {
      for (int i = 0; i < f.n(); ++i) v[i] = it->second(f.x(i), 0.0);
    } else {
      for (int i = 0; i < f.n(0); ++i)
        for (int j = 0; j < f.n(1); ++j)
          v[i * f.n(1) + j] = it->second(f.coord(0, i), f.coord(1, j));
    }
    if (f.dim() == 1) return GridFunctiond(f.lo(), f.hi(), f.n(), std::move(v), std::move(shifted));
    return GridFunctiond({f.lo(0), f.lo(1)}, {f.hi(0), f.hi(1)}, {f.n(0), f.n(1)}, std::move(v),
                         std::move(shifted));
  }
  if (order(a) > 4) throw order_too_high("derivative: |alpha| > 4 requires an analytic callback");

  Eigen::VectorXd v = f.values();
  Eigen::VectorXd tmp(v.size());
  if (f.dim() == 1) {
    fd_line(v.data(), tmp.data(), f.n(), 1, f.spacing(), a[0]);
    v = tmp;
    return GridFunctiond(f.lo(), f.hi(), f.n(), std::move(v), std::move(shifted));
  }
  const int n0 = f.n(0), n1 = f.n(1);
  if (a[0] > 0) {
    for (int j = 0; j < n1; ++j) fd_line(v.data() + j, tmp.data() + j, n0, n1, f.spacing(0), a[0]);
    v = tmp;
  }
  if (a[1] > 0) {
    for (int i = 0; i < n0; ++i)
      fd_line(v.data() + i * n1, tmp.data() + i * n1, n1, 1, f.spacing(1), a[1]);
    v = tmp;
  }
  return GridFunctiond({f.lo(0), f.lo(1)}, {f.hi(0), f.hi(1)}, {n0, n1}, std::move(v),
                       std::move(shifted));
}

GridFunctiond monomial_multiply(const GridFunctiond& f, const MultiIndex& gamma) {
  if (gamma[0] == 0 && (f.dim() == 1 || gamma[1] == 0)) return f;
  Eigen::VectorXd v = f.values();
  if (f.dim() == 1) {
    for (int i = 0; i < f.n(); ++i) v[i] *= std::pow(f.x(i), gamma[0]);
  } else {
    for (int i = 0; i < f.n(0); ++i)
      for (int j = 0; j < f.n(1); ++j)
        v[i * f.n(1) + j] *= std::pow(f.coord(0, i), gamma[0]) * std::pow(f.coord(1, j), gamma[1]);
  }
  return f.with_values(std::move(v));
}

double interpolate(const GridFunctiond& f, double x) {
  const double h = f.spacing();
  const double u = (x - f.lo()) / h;
  const int n = f.n();
  if (u < 0.0 || u > double(n - 1)) return 0.0;
  int i = int(std::floor(u));
  if (i >= n - 1) i = n - 2;
  const double t = u - i;
  const auto& v = f.values();
  const double p1 = v[i], p2 = v[i + 1];
  const double p0 = i > 0 ? v[i - 1] : 2.0 * p1 - p2;
  const double p3 = i + 2 < n ? v[i + 2] : 2.0 * p2 - p1;
  return p1 + 0.5 * t * (p2 - p0 + t * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 + t * (3.0 * (p1 - p2) + p3 - p0)));
}

bool decays_at_boundary(const GridFunctiond& f, double tol) {
  const double mx = f.values().cwiseAbs().maxCoeff();
  if (mx == 0.0) return true;
  double edge = 0.0;
  if (f.dim() == 1) {
    edge = std::max(std::abs(f[0]), std::abs(f[f.n() - 1]));
  } else {
    const int n0 = f.n(0), n1 = f.n(1);
    for (int i = 0; i < n0; ++i)
      edge = std::max({edge, std::abs(f.at(i, 0)), std::abs(f.at(i, n1 - 1))});
    for (int j = 0; j < n1; ++j)
      edge = std::max({edge, std::abs(f.at(0, j)), std::abs(f.at(n0 - 1, j))});
  }
  return edge <= tol * mx;
}

double lp_norm(const GridFunctiond& f, double p) {
  if (std::isinf(p)) return f.values().cwiseAbs().maxCoeff();
  Eigen::VectorXd v = f.values().cwiseAbs().array().pow(p).matrix();
  return std::pow(integrate(f.with_values(std::move(v))), 1.0 / p);
}

GridFunctiond convolve(const GridFunctiond& f, const GridFunctiond& g, Warnings* warnings) {
  if (f.dim() != g.dim()) throw std::invalid_argument("convolve: dimension mismatch");
  if (!decays_at_boundary(g, 1e-12)) warn(warnings, "convolve: kernel does not decay at its box boundary");

  if (f.dim() == 1) {
    const int nf = f.n(), ng = g.n();
    const double hf = f.spacing(), hg = g.spacing();
    // x_i − y_j = hf·(i − j), which sits at g-index (hf·(i − j) − g.lo) / hg.
    const double off = -g.lo() / hg;
    const bool aligned = std::abs(hf - hg) <= 1e-12 * hg && std::abs(off - std::round(off)) <= 1e-9;
    Eigen::VectorXd out = Eigen::VectorXd::Zero(nf);
    const auto& fv = f.values();
    const auto& gv = g.values();
    if (aligned) {
      const long o = std::lround(off);
      // g(x_i - y_j) sits at g-index o + i - j.
      for (int i = 0; i < nf; ++i) {
        const long jlo = std::max<long>(0, o + i - (ng - 1));
        const long jhi = std::min<long>(nf - 1, o + i);
        double s = 0.0;
        for (long j = jlo; j <= jhi; ++j) {
          const double w = (j == 0 || j == nf - 1) ? 0.5 : 1.0;
          s += w * fv[j] * gv[o + i - j];
        }
        out[i] = s * hf;
      }
    } else {
      for (int i = 0; i < nf; ++i) {
        const double xi = f.x(i);
        double s = 0.0;
        for (int j = 0; j < nf; ++j) {
          const double z = xi - f.x(j);
          if (z < g.lo() || z > g.hi()) continue;
          const double w = (j == 0 || j == nf - 1) ? 0.5 : 1.0;
          s += w * fv[j] * interpolate(g, z);
        }
        out[i] = s * hf;
      }
    }
    return f.with_values(std::move(out));
  }

  // d = 2: grids must share spacing and be node-aligned.
  for (int a = 0; a < 2; ++a) {
    const double off = -g.lo(a) / g.spacing(a);
    if (std::abs(f.spacing(a) - g.spacing(a)) > 1e-12 * g.spacing(a) ||
        std::abs(off - std::round(off)) > 1e-9)
      throw std::invalid_argument("convolve: 2-d grids must be node-aligned");
  }
  const int n0 = f.n(0), n1 = f.n(1), m0 = g.n(0), m1 = g.n(1);
  const long o0 = std::lround(-g.lo(0) / g.spacing(0));
  const long o1 = std::lround(-g.lo(1) / g.spacing(1));
  Eigen::VectorXd out = Eigen::VectorXd::Zero(f.size());
  for (int i = 0; i < n0; ++i)
    for (int j = 0; j < n1; ++j) {
      double s = 0.0;
      for (int k = 0; k < n0; ++k) {
        const long gi = o0 + i - k;
        if (gi < 0 || gi >= m0) continue;
        const double wk = (k == 0 || k == n0 - 1) ? 0.5 : 1.0;
        for (int l = 0; l < n1; ++l) {
          const long gj = o1 + j - l;
          if (gj < 0 || gj >= m1) continue;
          const double wl = (l == 0 || l == n1 - 1) ? 0.5 : 1.0;
          s += wk * wl * f.at(k, l) * g.at(int(gi), int(gj));
        }
      }
      out[i * n1 + j] = s * f.spacing(0) * f.spacing(1);
    }
  return f.with_values(std::move(out));
}

// ---------------------------------------------------------------------------
// Serialization

std::string to_csv(const GridFunctiond& f) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "dim," << f.dim() << "\n";
  os << "box";
  for (int a = 0; a < f.dim(); ++a) os << "," << f.lo(a) << "," << f.hi(a);
  os << "\nn_points";
  for (int a = 0; a < f.dim(); ++a) os << "," << f.n(a);
  os << "\nvalues\n";
  for (Eigen::Index i = 0; i < f.size(); ++i) os << f[i] << "\n";
  return os.str();
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  return out;
}

GridFunctiond build(int dim, const std::vector<double>& box, const std::vector<int>& n,
                    Eigen::VectorXd v) {
  if (dim == 1) {
    if (box.size() != 2 || n.size() != 1) throw std::invalid_argument("grid header mismatch");
    return GridFunctiond(box[0], box[1], n[0], std::move(v));
  }
  if (dim == 2) {
    if (box.size() != 4 || n.size() != 2) throw std::invalid_argument("grid header mismatch");
    return GridFunctiond({box[0], box[2]}, {box[1], box[3]}, {n[0], n[1]}, std::move(v));
  }
  throw std::invalid_argument("grid dim must be 1 or 2");
}

}  // namespace

GridFunctiond from_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  int dim = 0;
  std::vector<double> box;
  std::vector<int> n;
  std::vector<double> vals;
  bool in_values = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (in_values) {
      vals.push_back(std::stod(line));
      continue;
    }
    auto parts = split(line, ',');
    if (parts[0] == "dim") {
      dim = std::stoi(parts.at(1));
    } else if (parts[0] == "box") {
      for (size_t i = 1; i < parts.size(); ++i) box.push_back(std::stod(parts[i]));
    } else if (parts[0] == "n_points") {
      for (size_t i = 1; i < parts.size(); ++i) n.push_back(std::stoi(parts[i]));
    } else if (parts[0] == "values") {
      in_values = true;
    } else {
      throw std::invalid_argument("from_csv: unexpected header '" + parts[0] + "'");
    }
  }
  return build(dim, box, n, Eigen::Map<Eigen::VectorXd>(vals.data(), Eigen::Index(vals.size())));
}

std::string to_json(const GridFunctiond& f) {
  nlohmann::json j;
  j["dim"] = f.dim();
  nlohmann::json box = nlohmann::json::array();
  std::vector<int> n;
  for (int a = 0; a < f.dim(); ++a) {
    box.push_back({f.lo(a), f.hi(a)});
    n.push_back(f.n(a));
  }
  j["box"] = box;
  j["n_points"] = n;
  j["values"] = std::vector<double>(f.values().data(), f.values().data() + f.size());
  return j.dump();
}

GridFunctiond from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  std::vector<double> box;
  for (const auto& b : j.at("box")) {
    box.push_back(b.at(0).get<double>());
    box.push_back(b.at(1).get<double>());
  }
  auto vals = j.at("values").get<std::vector<double>>();
  return build(j.at("dim").get<int>(), box, j.at("n_points").get<std::vector<int>>(),
               Eigen::Map<Eigen::VectorXd>(vals.data(), Eigen::Index(vals.size())));
}

// ---------------------------------------------------------------------------

double total_mass(const MeasureRep& mu) {
  return std::visit(
      [](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, GridDensity>) {
          return integrate(m.f);
        } else if constexpr (std::is_same_v<T, Samples>) {
          double s = 0.0;
          for (double w : m.w) s += w;
          return s;
        } else {
          double s = 0.0;
          for (const auto& c : m.components) s += c.weight;
          return s;
        }
      },
      mu);
}

void check_measure(const MeasureRep& mu, bool probability) {
  if (const auto* s = std::get_if<Samples>(&mu)) {
    if (s->x.size() != s->w.size()) throw std::invalid_argument("Samples: size mismatch");
    if (probability)
      for (double w : s->w)
        if (w < 0.0) throw std::invalid_argument("Samples: negative weight");
  } else if (const auto* g = std::get_if<GaussMix>(&mu)) {
    for (const auto& c : g->components)
      if (!(c.variance > 0.0)) throw std::invalid_argument("GaussMix: variance must be positive");
  }
}

Samples empirical(std::vector<double> x) {
  Samples s;
  s.w.assign(x.size(), 1.0 / double(x.size()));
  s.x = std::move(x);
  return s;
}

}  // namespace regint
