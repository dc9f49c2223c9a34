#include "regint/simplex.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <vector>

namespace regint {

namespace {

constexpr double kPivotTol = 1e-10;
constexpr double kCostTol = 1e-11;
constexpr int kDegenerateRun = 30;

struct Tableau {
  // Rows 0..m−1 constraints, row m objective (reduced costs). Last column RHS.
  Eigen::MatrixXd T;
  std::vector<int> basis;
  int m = 0;
  int ncols = 0;  // excluding RHS

  double& rhs(int r) { return T(r, ncols); }

  void pivot(int pr, int pc) {
    const double piv = T(pr, pc);
    T.row(pr) /= piv;
    const Eigen::VectorXd col = T.col(pc);
    const Eigen::RowVectorXd row = T.row(pr);
    for (int r = 0; r <= m; ++r) {
      if (r == pr || col[r] == 0.0) continue;
      T.row(r).noalias() -= col[r] * row;
    }
    T.col(pc).setZero();
    T(pr, pc) = 1.0;
    basis[pr] = pc;
  }

  // Minimizes the objective row over columns allowed[j].
  LpStatus run(const std::vector<char>& allowed, long max_it, long& it) {
    int degenerate = 0;
    bool bland = false;
    while (true) {
      if (it >= max_it) return LpStatus::iteration_limit;
      int pc = -1;
      double best = -kCostTol;
      for (int j = 0; j < ncols; ++j) {
        if (!allowed[j]) continue;
        const double d = T(m, j);
        if (bland) {
          if (d < -kCostTol) {
            pc = j;
            break;
          }
        } else if (d < best) {
          best = d;
          pc = j;
        }
      }
      if (pc < 0) return LpStatus::optimal;
      int pr = -1;
      double ratio = std::numeric_limits<double>::infinity();
      for (int r = 0; r < m; ++r) {
        const double a = T(r, pc);
        if (a <= kPivotTol) continue;
        const double q = std::max(0.0, T(r, ncols)) / a;
        if (q < ratio - 1e-14 || (q <= ratio + 1e-14 && pr >= 0 && basis[r] < basis[pr])) {
          if (q < ratio - 1e-14 || pr < 0) ratio = q;
          pr = r;
        }
      }
      if (pr < 0) return LpStatus::unbounded;
      if (ratio <= 1e-14) {
        if (++degenerate >= kDegenerateRun) bland = true;
      } else {
        degenerate = 0;
        bland = false;
      }
      pivot(pr, pc);
      ++it;
    }
  }
};

}  // namespace

LpResult solve_lp(const LinearProgram& lp, long max_iterations) {
  const int m = int(lp.A.rows());
  const int n = int(lp.A.cols());
  if (lp.b.size() != m || lp.c.size() != n) throw std::invalid_argument("solve_lp: dimension mismatch");

  // Rows without a usable slack get an artificial column.
  std::vector<int> start(m, -1);
  if (lp.initial_basis.size() == m)
    for (int r = 0; r < m; ++r) start[r] = lp.initial_basis[r];
  std::vector<int> art_rows;
  for (int r = 0; r < m; ++r)
    if (start[r] < 0 || lp.b[r] < 0.0) art_rows.push_back(r);

  const int na = int(art_rows.size());
  Tableau tb;
  tb.m = m;
  tb.ncols = n + na;
  tb.T = Eigen::MatrixXd::Zero(m + 1, tb.ncols + 1);
  tb.T.topLeftCorner(m, n) = lp.A;
  tb.T.block(0, tb.ncols, m, 1) = lp.b;
  for (int r = 0; r < m; ++r)
    if (lp.b[r] < 0.0) tb.T.row(r) *= -1.0;
  tb.basis = start;
  for (int i = 0; i < na; ++i) {
    tb.T(art_rows[i], n + i) = 1.0;
    tb.basis[art_rows[i]] = n + i;
  }

  LpResult res;
  long it = 0;
  std::vector<char> allowed(tb.ncols, 1);

  if (na > 0) {
    // Phase I: minimize the sum of artificials.
    tb.T.row(m).setZero();
    for (int i = 0; i < na; ++i) tb.T.row(m) -= tb.T.row(art_rows[i]);
    for (int i = 0; i < na; ++i) tb.T(m, n + i) = 0.0;
    const LpStatus s = tb.run(allowed, max_iterations, it);
    if (s == LpStatus::iteration_limit) {
      res.status = s;
      res.iterations = it;
      return res;
    }
    if (-tb.T(m, tb.ncols) > 1e-9 * std::max(1.0, lp.b.cwiseAbs().maxCoeff())) {
      res.status = LpStatus::infeasible;
      res.iterations = it;
      return res;
    }
    // Drive artificials out of the basis where possible.
    for (int r = 0; r < m; ++r) {
      if (tb.basis[r] < n) continue;
      for (int j = 0; j < n; ++j)
        if (std::abs(tb.T(r, j)) > 1e-9) {
          tb.pivot(r, j);
          break;
        }
    }
    for (int i = 0; i < na; ++i) allowed[n + i] = 0;
  }

  // Phase II objective row: c − c_B B^{-1} A.
  tb.T.row(m).setZero();
  tb.T.block(m, 0, 1, n) = lp.c.transpose();
  for (int r = 0; r < m; ++r) {
    const int bj = tb.basis[r];
    const double cb = bj < n ? lp.c[bj] : 0.0;
    if (cb != 0.0) tb.T.row(m) -= cb * tb.T.row(r);
  }
  const LpStatus s = tb.run(allowed, max_iterations, it);
  res.status = s;
  res.iterations = it;
  res.x = Eigen::VectorXd::Zero(n);
  for (int r = 0; r < m; ++r)
    if (tb.basis[r] < n) res.x[tb.basis[r]] = tb.T(r, tb.ncols);
  res.objective = lp.c.dot(res.x);
  return res;
}

std::string dump_lp(const LinearProgram& lp) {
  std::ostringstream os;
  os << std::setprecision(12);
  os << "min";
  for (Eigen::Index j = 0; j < lp.c.size(); ++j) os << " " << lp.c[j];
  os << "\n";
  for (Eigen::Index r = 0; r < lp.A.rows(); ++r) {
    for (Eigen::Index j = 0; j < lp.A.cols(); ++j) os << (j ? " " : "") << lp.A(r, j);
    os << " | " << lp.b[r] << "\n";
  }
  return os.str();
}

}  // namespace regint
