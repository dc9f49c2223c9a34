#pragma once

#include "regint/grid_fn.hpp"

#include <vector>

namespace regint {

/// ∂^j of (1/n) Σ_i N(y; c_i, s_i²) on the uniform grid lo..hi (N points), j = 0..max_deriv.
/// Each component is truncated at reach standard deviations.
std::vector<Eigen::VectorXd> gaussian_mixture_stack(const std::vector<double>& centers,
                                                    const std::vector<double>& sd, double lo, double hi,
                                                    int N, int max_deriv, double reach = 8.5);

/// Grid function of stack[0] whose derivative callbacks return stack[j] at the grid nodes.
GridFunctiond mixture_grid_function(std::vector<Eigen::VectorXd> stack, double lo, double hi);

/// ∂^j_y N(y; 0, s²).
double gaussian_deriv(int j, double y, double s);

}  // namespace regint
