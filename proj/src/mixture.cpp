#include "regint/mixture.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

namespace regint {

namespace {
constexpr double kInvSqrt2Pi = 0.3989422804014327;
}

double gaussian_deriv(int j, double y, double s) {
  const double u = y / s;
  double h0 = 1.0, h1 = u;
  if (j == 0) h1 = 1.0;
  for (int k = 1; k < j; ++k) {
    const double h2 = u * h1 - double(k) * h0;
    h0 = h1;
    h1 = h2;
  }
  const double he = j == 0 ? 1.0 : h1;
  return (j % 2 ? -1.0 : 1.0) * he * std::exp(-0.5 * u * u) * kInvSqrt2Pi / std::pow(s, j + 1);
}

std::vector<Eigen::VectorXd> gaussian_mixture_stack(const std::vector<double>& centers,
                                                    const std::vector<double>& sd, double lo, double hi,
                                                    int N, int max_deriv, double reach) {
  if (centers.size() != sd.size() || centers.empty())
    throw std::invalid_argument("gaussian_mixture_stack: centers and widths differ in size");
  if (N < 8 || !(hi > lo) || max_deriv < 0) throw std::invalid_argument("gaussian_mixture_stack: bad grid");
  const double h = (hi - lo) / double(N - 1);
  std::vector<Eigen::VectorXd> t(size_t(max_deriv) + 1, Eigen::VectorXd::Zero(N));
  std::vector<double> he(size_t(max_deriv) + 1);
  for (size_t i = 0; i < centers.size(); ++i) {
    const double c = centers[i], s = sd[i];
    if (!(s > 0)) throw std::domain_error("gaussian_mixture_stack: nonpositive width");
    const double from = std::max(0.0, std::floor((c - reach * s - lo) / h));
    const double to = std::min(double(N - 1), std::ceil((c + reach * s - lo) / h));
    for (int k = int(from); k <= int(to); ++k) {
      const double u = (lo + h * double(k) - c) / s;
      he[0] = 1.0;
      if (max_deriv >= 1) he[1] = u;
      for (int j = 1; j < max_deriv; ++j) he[size_t(j) + 1] = u * he[size_t(j)] - double(j) * he[size_t(j) - 1];
      double scale = std::exp(-0.5 * u * u) * kInvSqrt2Pi / s;
      for (int j = 0; j <= max_deriv; ++j) {
        t[size_t(j)][k] += (j % 2 ? -1.0 : 1.0) * he[size_t(j)] * scale;
        scale /= s;
      }
    }
  }
  for (auto& v : t) v /= double(centers.size());
  return t;
}

GridFunctiond mixture_grid_function(std::vector<Eigen::VectorXd> stack, double lo, double hi) {
  if (stack.empty()) throw std::invalid_argument("mixture_grid_function: empty stack");
  const int N = int(stack[0].size());
  const double h = (hi - lo) / double(N - 1);
  auto tables = std::make_shared<std::vector<Eigen::VectorXd>>(std::move(stack));
  GridFunctiond::CallbackTable cbs;
  for (int j = 1; j < int(tables->size()); ++j)
    cbs[{j, 0}] = [tables, j, lo, h, N](double x, double) {
      const long k = std::lround((x - lo) / h);
      if (k < 0 || k >= N) return 0.0;
      return (*tables)[size_t(j)][k];
    };
  return GridFunctiond(lo, hi, N, (*tables)[0], std::move(cbs));
}

}  // namespace regint
