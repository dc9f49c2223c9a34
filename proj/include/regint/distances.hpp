#pragma once

#include "regint/grid_fn.hpp"
#include "regint/simplex.hpp"

#include <string>
#include <vector>

namespace regint {

/// Signed discrete measure μ − ν on a sorted support, with the order k of the
/// test-function class ‖φ‖_{k,∞} = Σ_{j≤k} sup|φ^{(j)}| ≤ 1.
struct DkProblem {
  int k = 0;
  std::vector<double> nodes;
  std::vector<double> w;
};

struct DkOptions {
  /// Supports larger than this are thinned by linear (mass and mean preserving) lumping.
  int max_nodes = 240;
  /// Hat-function discretization of Gaussian mixtures.
  int mixture_points = 401;
};

double mixture_pdf(const GaussMix& g, double x);
double mixture_cdf(const GaussMix& g, double x);

/// Nodes and masses of one measure (trapezoid masses for grid densities, hat masses for mixtures).
void discretize(const MeasureRep& mu, std::vector<double>& nodes, std::vector<double>& masses,
                int mixture_points = 401);

DkProblem make_dk_problem(const MeasureRep& mu, const MeasureRep& nu, int k, const DkOptions& opt = {});

/// Row r of D_j is j!·[x_r, …, x_{r+j}] (divided difference), so D_j = Δ^j/Δx^j on uniform nodes.
Eigen::MatrixXd difference_operator(const std::vector<double>& nodes, int j);

/// The LP in dual form: min s subject to Σ_j D_jᵀ v_j = w and ‖v_j‖₁ ≤ s.
/// Its optimum equals max{Σ φ_i w_i : Σ_j max_i |D_j φ|_i ≤ 1}.
LinearProgram dk_linear_program(const DkProblem& p);

double dk_lp(const DkProblem& p);
double dk_lp(const MeasureRep& mu, const MeasureRep& nu, int k, const DkOptions& opt = {});

/// Total variation ∫|f−g| or Σ|w_i−v_i|.
double tv_distance(const MeasureRep& mu, const MeasureRep& nu);

/// ∫|F_μ − F_ν|.
double wasserstein1_1d(const MeasureRep& mu, const MeasureRep& nu);

/// Exhaustive branch-and-bound search over φ_i ∈ {−1, −1+step, …, 1} (small supports only).
double dk_bruteforce(const DkProblem& p, double step = 0.05);

std::string dump_dk_problem(const DkProblem& p);

}  // namespace regint
