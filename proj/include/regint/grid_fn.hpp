#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace regint {

/// Derivative orders per axis; the second entry is ignored in d=1.
using MultiIndex = std::array<int, 2>;

inline int order(const MultiIndex& a) { return a[0] + a[1]; }

/// Collects non-fatal diagnostics (boundary mass, tail flags).
using Warnings = std::vector<std::string>;

inline void warn(Warnings* w, std::string msg) {
  if (w) w->push_back(std::move(msg));
}

class order_too_high : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Real function sampled on a uniform grid over a box in dimension 1 or 2.
/// Values are stored row-major: index = i0 * n1 + i1.
template <typename Scalar>
class GridFunction {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Callback = std::function<Scalar(Scalar, Scalar)>;
  using CallbackTable = std::map<MultiIndex, Callback>;

  GridFunction() = default;

  GridFunction(Scalar lo, Scalar hi, int n, Vector values, CallbackTable derivs = {})
      : dim_(1), lo_{lo, 0}, hi_{hi, 0}, n_{n, 1}, values_(std::move(values)),
        derivs_(std::move(derivs)) {
    validate();
  }

  GridFunction(std::array<Scalar, 2> lo, std::array<Scalar, 2> hi, std::array<int, 2> n,
               Vector values, CallbackTable derivs = {})
      : dim_(2), lo_(lo), hi_(hi), n_(n), values_(std::move(values)),
        derivs_(std::move(derivs)) {
    validate();
  }

  template <typename F>
  static GridFunction sample(Scalar lo, Scalar hi, int n, F&& f, CallbackTable derivs = {}) {
    Vector v(n);
    const Scalar h = (hi - lo) / Scalar(n - 1);
    for (int i = 0; i < n; ++i) v[i] = f(lo + h * Scalar(i));
    return GridFunction(lo, hi, n, std::move(v), std::move(derivs));
  }

  template <typename F>
  static GridFunction sample2(std::array<Scalar, 2> lo, std::array<Scalar, 2> hi,
                              std::array<int, 2> n, F&& f) {
    Vector v(n[0] * n[1]);
    const Scalar h0 = (hi[0] - lo[0]) / Scalar(n[0] - 1);
    const Scalar h1 = (hi[1] - lo[1]) / Scalar(n[1] - 1);
    for (int i = 0; i < n[0]; ++i)
      for (int j = 0; j < n[1]; ++j)
        v[i * n[1] + j] = f(lo[0] + h0 * Scalar(i), lo[1] + h1 * Scalar(j));
    return GridFunction(lo, hi, n, std::move(v));
  }

  int dim() const { return dim_; }
  Scalar lo(int axis = 0) const { return lo_[axis]; }
  Scalar hi(int axis = 0) const { return hi_[axis]; }
  int n(int axis = 0) const { return n_[axis]; }
  Scalar spacing(int axis = 0) const { return (hi_[axis] - lo_[axis]) / Scalar(n_[axis] - 1); }
  Eigen::Index size() const { return values_.size(); }
  Scalar coord(int axis, int i) const { return lo_[axis] + spacing(axis) * Scalar(i); }
  Scalar x(int i) const { return coord(0, i); }

  const Vector& values() const { return values_; }
  Scalar operator[](Eigen::Index i) const { return values_[i]; }
  Scalar at(int i0, int i1) const { return values_[i0 * n_[1] + i1]; }

  const CallbackTable& analytic_derivs() const { return derivs_; }
  bool has_analytic(const MultiIndex& a) const { return derivs_.count(a) > 0; }

  /// Same grid, new values, no callbacks.
  GridFunction with_values(Vector v) const {
    GridFunction g = *this;
    g.values_ = std::move(v);
    g.derivs_.clear();
    g.validate();
    return g;
  }

  bool same_grid(const GridFunction& o) const {
    if (dim_ != o.dim_) return false;
    for (int a = 0; a < dim_; ++a)
      if (n_[a] != o.n_[a] || lo_[a] != o.lo_[a] || hi_[a] != o.hi_[a]) return false;
    return true;
  }

 private:
  void validate() const {
    for (int a = 0; a < dim_; ++a) {
      if (n_[a] < 8) throw std::invalid_argument("GridFunction: n_points must be >= 8");
      if (!(hi_[a] > lo_[a])) throw std::invalid_argument("GridFunction: empty box");
    }
    if (values_.size() != Eigen::Index(n_[0]) * n_[1])
      throw std::invalid_argument("GridFunction: value count does not match grid");
    if (!values_.allFinite()) throw std::domain_error("GridFunction: non-finite value");
  }

  int dim_ = 1;
  std::array<Scalar, 2> lo_{0, 0};
  std::array<Scalar, 2> hi_{1, 0};
  std::array<int, 2> n_{8, 1};
  Vector values_ = Vector::Zero(8);
  CallbackTable derivs_;
};

using GridFunctiond = GridFunction<double>;

/// Trapezoid rule over the box.
template <typename Scalar>
Scalar integrate(const GridFunction<Scalar>& f) {
  const auto& v = f.values();
  if (f.dim() == 1) {
    const int n = f.n();
    Scalar s = Scalar(0.5) * (v[0] + v[n - 1]);
    for (int i = 1; i < n - 1; ++i) s += v[i];
    return s * f.spacing();
  }
  const int n0 = f.n(0), n1 = f.n(1);
  Scalar s = 0;
  for (int i = 0; i < n0; ++i) {
    const Scalar wi = (i == 0 || i == n0 - 1) ? Scalar(0.5) : Scalar(1);
    for (int j = 0; j < n1; ++j) {
      const Scalar wj = (j == 0 || j == n1 - 1) ? Scalar(0.5) : Scalar(1);
      s += wi * wj * v[i * n1 + j];
    }
  }
  return s * f.spacing(0) * f.spacing(1);
}

/// Pointwise (1+|x|)^l, with |x| the Euclidean norm of the node.
template <typename Scalar>
GridFunction<Scalar> weight_multiply(const GridFunction<Scalar>& f, Scalar l) {
  if (l == Scalar(0)) return f;
  typename GridFunction<Scalar>::Vector v = f.values();
  if (f.dim() == 1) {
    for (int i = 0; i < f.n(); ++i) v[i] *= std::pow(Scalar(1) + std::abs(f.x(i)), l);
  } else {
    for (int i = 0; i < f.n(0); ++i)
      for (int j = 0; j < f.n(1); ++j) {
        const Scalar r = std::hypot(f.coord(0, i), f.coord(1, j));
        v[i * f.n(1) + j] *= std::pow(Scalar(1) + r, l);
      }
  }
  return f.with_values(std::move(v));
}

/// Pointwise x^gamma (multi-index power).
GridFunctiond monomial_multiply(const GridFunctiond& f, const MultiIndex& gamma);

/// ∂_α f: analytic callback if registered, otherwise 4th-order finite differences.
GridFunctiond derivative(const GridFunctiond& f, const MultiIndex& alpha);

/// Direct quadrature convolution sampled on f's grid.
GridFunctiond convolve(const GridFunctiond& f, const GridFunctiond& g, Warnings* warnings = nullptr);

/// True when |f| on the box boundary is at most tol * max|f|.
bool decays_at_boundary(const GridFunctiond& f, double tol);

/// L^p norm by trapezoid quadrature; p = infinity gives the max norm.
double lp_norm(const GridFunctiond& f, double p);

/// Cubic (Catmull-Rom) interpolation at x in d=1; zero outside the box.
double interpolate(const GridFunctiond& f, double x);

std::string to_csv(const GridFunctiond& f);
GridFunctiond from_csv(const std::string& text);
std::string to_json(const GridFunctiond& f);
GridFunctiond from_json(const std::string& text);

/// Finite Fornberg weights for the m-th derivative at x0 from the given nodes.
Eigen::VectorXd fd_weights(double x0, const Eigen::VectorXd& nodes, int m);

// ---------------------------------------------------------------------------

struct GridDensity {
  GridFunctiond f;
};

struct Samples {
  std::vector<double> x;
  std::vector<double> w;
};

struct GaussComponent {
  double weight;
  double mean;
  double variance;
};

struct GaussMix {
  std::vector<GaussComponent> components;
};

using MeasureRep = std::variant<GridDensity, Samples, GaussMix>;

double total_mass(const MeasureRep& mu);
void check_measure(const MeasureRep& mu, bool probability);

/// Uniform-weight sample cloud.
Samples empirical(std::vector<double> x);

}  // namespace regint
