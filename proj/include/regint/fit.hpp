#pragma once

#include <vector>

namespace regint {

struct LinearFit {
  double slope = 0;
  double intercept = 0;
  double r2 = 0;
};

/// Ordinary least squares y ≈ slope·x + intercept. Needs ≥ 2 points.
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

/// Least squares on (ln x, ln y). Needs ≥ 3 points.
LinearFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y);

double median(std::vector<double> v);

/// max/median of v.
double max_over_median(const std::vector<double>& v);

/// max/min of |v|.
double spread(const std::vector<double>& v);

}  // namespace regint
