#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace regint {

struct MeanSe {
  double mean = 0;
  double se = 0;
};

inline MeanSe mean_se(const std::vector<double>& v) {
  if (v.size() < 2) throw std::invalid_argument("mean_se: need at least two values");
  double s = 0;
  for (double x : v) s += x;
  const double m = s / double(v.size());
  double ss = 0;
  for (double x : v) ss += (x - m) * (x - m);
  return {m, std::sqrt(ss / double(v.size() - 1) / double(v.size()))};
}

/// Kolmogorov limit law: P(K > x) = 2 Σ_{j≥1} (−1)^{j−1} e^{−2j²x²}.
inline double kolmogorov_survival(double x) {
  if (x <= 0) return 1.0;
  if (x < 0.2) return 1.0;
  double s = 0;
  for (int j = 1; j <= 100; ++j) {
    const double t = std::exp(-2.0 * j * j * x * x);
    s += (j % 2 ? 2.0 : -2.0) * t;
    if (t < 1e-18) break;
  }
  return std::clamp(s, 0.0, 1.0);
}

struct KsResult {
  double statistic = 0;
  double p_value = 1;
  /// Critical value of D at the given level from the limit law.
  double critical_1pct = 0;
};

/// Two-sample Kolmogorov–Smirnov test (asymptotic p-value with the Stephens correction).
inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = double(a.size()), nb = double(b.size());
  size_t i = 0, j = 0;
  double d = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(double(i) / na - double(j) / nb));
  }
  const double ne = na * nb / (na + nb);
  const double sq = std::sqrt(ne);
  KsResult r;
  r.statistic = d;
  r.p_value = kolmogorov_survival((sq + 0.12 + 0.11 / sq) * d);
  r.critical_1pct = 1.6276 / (sq + 0.12 + 0.11 / sq);
  return r;
}

}  // namespace regint
