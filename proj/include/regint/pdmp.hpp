#pragma once

#include "regint/grid_fn.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace regint {

/// Jump equation in d = 1: jumps c(z, X−) accepted when u < γ(z, X−), flow ẋ = g(x) between jumps.
struct PdmpModel {
  std::string name;
  std::function<double(double z, double x)> gamma;
  std::function<double(double z, double x)> c;
  std::function<double(double z, double x)> dc_dz;  // optional; central differences when empty
  std::function<double(double z, double x)> dc_dx;  // optional
  std::function<double(double x)> g;
  /// Ψ_s(x) in closed form when available; RK4 otherwise.
  std::function<double(double x, double s)> flow_exact;
  double gamma_hi = 1.5;  // γ̄
  double gamma_lo = 0.5;  // γ̲
  double a = 1.0, b = 2.0, r = 6.0;  // c̲ = a/(1+|z|^r), c̄ = b/(1+|z|^r)
  double gamma_ln_bound = 10.0;      // bound on first derivatives of ln γ
};

/// γ = 1 + 0.5 sin(x) e^{−z²}, c = a z (1+z²)^{−(r+1)/2} (1 + 0.1 tanh x), g = −tanh,
/// b set to 1.1× the largest (1+|z|^r)·(|c|, |∂c|) found on a dense grid.
PdmpModel default_pdmp_model(double r = 6.0, double a = 1.0);

/// Φ_M = ψ ∗ 1_{(−M, M)} with ψ the normalized bump on [−1, 1].
double mollified_indicator(int M, double z);

/// |z*_M| = M + 3.
inline double z_star(int M) { return M + 3.0; }

/// Fixed-step RK4 for ẋ = g(x) over duration s with step at most h.
double flow_rk4(const std::function<double(double)>& g, double x, double s, double h);
/// Ψ_s(x): closed form when the model has one, else RK4 with step h.
double flow(const PdmpModel& m, double x, double s, double h);

struct HypothesisCheck {
  std::string name;
  bool pass = false;
  double worst = 0;   // worst margin (negative means violated)
  double z = 0, x = 0;  // witness
};

struct HypothesisReport {
  std::vector<HypothesisCheck> checks;  // a1, a2, h1, h2
  bool all_pass = false;
  const HypothesisCheck& get(const std::string& name) const;
};

/// Grid check on |z| ≤ M + 4, |x| ≤ 6.
HypothesisReport validate_hypotheses(const PdmpModel& m, int M);

/// 2γ̄ μ(B_{M+1}) = 4γ̄(M+1).
double lambda_M(const PdmpModel& m, int M);

/// (1/μ(B_{M+1})) ∫_{B_{M+1}} (1 − γ(z,x)/2γ̄) dz by Gauss–Legendre panels.
double theta(const PdmpModel& m, int M, double x);

/// q_M(x, z) = ψ(z − z*_M) θ(x) + γ(z,x) 1_{B_{M+1}}(z) / (2γ̄ μ(B_{M+1})).
double q_M_density(const PdmpModel& m, int M, double x, double z);

struct QmDraw {
  double z = 0;
  bool bump = false;
  long proposals = 0;
};

/// With probability θ(x) a bump draw around z*_M, else uniform proposals on B_{M+1}
/// accepted with probability γ(z,x)/γ̄ (at most 10^6 proposals).
QmDraw sample_qM(const PdmpModel& m, int M, double x, std::mt19937_64& g);
double sample_qM(const PdmpModel& m, int M, double x, std::uint64_t seed);

/// Indicator representation: Poisson(λ_M) marks (Z, U), jump c_M(Z, X−) when U < γ(Z, X−).
std::vector<double> simulate_indicator(const PdmpModel& m, int M, double x0, double t, int n,
                                       std::uint64_t seed, int workers = 0,
                                       std::vector<int>* jump_counts = nullptr);

/// Smooth representation: Poisson(λ_M) jumps with Z̄ ~ q_M(X−, ·).
std::vector<double> simulate_smooth(const PdmpModel& m, int M, double x0, double t, int n,
                                    std::uint64_t seed, int workers = 0,
                                    std::vector<int>* jump_counts = nullptr);

/// X_t^M for several M driven by one Poisson point process on B_{max M + 1}, plus the shared
/// standard normal Δ. Row i is path i, column l is levels[l].
struct CoupledRun {
  std::vector<int> levels;
  std::vector<std::vector<double>> x;  // x[l][i]
  std::vector<double> delta;           // Δ_i
};

CoupledRun simulate_coupled(const PdmpModel& m, const std::vector<int>& levels, double x0, double t,
                            int n, std::uint64_t seed, int workers = 0);

/// γ̲ ∫_{|z| > M−1} c̲(z)² dz.
double u_M(const PdmpModel& m, int M);

class resolution_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct DensityStack {
  double sigma = 0;   // (t U_M)^{1/2}
  double h = 0;       // x step of the central difference
  GridFunctiond p;    // p_t^M(x, ·), callbacks ∂_y^j up to max_dy
  GridFunctiond dx;   // ∂_x p_t^M(x, ·)
  GridFunctiond dxdy; // ∂_x ∂_y p_t^M(x, ·)
  double mass = 0;
};

/// p_t^M(x, y) = (1/n) Σ N(y; X̄_t^M(x)_i, t U_M) from the smooth representation; ∂_x by central
/// differences with common random numbers, h = max(1e−3, σ/10). Throws resolution_error when the
/// y spacing exceeds σ/3.
DensityStack density_pM(const PdmpModel& m, int M, double x, double ylo, double yhi, int ny, double t,
                        int n, std::uint64_t seed, int max_dy = 2, int workers = 0);

struct A14Report {
  std::vector<int> M;
  std::vector<double> error;  // E f(F^M) − E f(F^{M_ref})
  std::vector<double> se;
  std::vector<double> upper;  // |error| + 2 se
  std::vector<char> noise_dominated;  // |error| < 2 se
  double slope = 0;           // fit of log upper vs log M
  double slope_raw = 0;       // fit of log |error| vs log M
  double predicted = 0;       // −(r − 1)
  bool pass = false;          // slope ≤ 0.8 · predicted
};

A14Report rate_a14(const PdmpModel& m, const std::function<double(double)>& f, const std::vector<int>& M_list,
                   int M_ref, double t, double x0, int n, std::uint64_t seed, int workers = 0);

struct MpMainReport {
  int q = 0;
  double p = 2;
  std::vector<int> M;
  std::vector<double> norm;          // ‖p^M − p^{M_ref}‖_{W^{q,p}(B_R × B_R)}
  std::vector<double> sigma;         // (t U_M)^{1/2}
  double slope = 0;
  double predicted = 0;              // r − 1 − 2(q + 1 + 1/p_*)
  bool pass_rate = false;            // slope ≤ −0.7 · predicted
  std::vector<double> a15_sup;       // sup_{|x|,|y| ≤ R} |∂_x ∂_y p^M|
  double a15_exponent = 0;
  bool pass_a15 = false;             // exponent ≤ 1.2 · (2 + 1)
};

/// Exact Gaussian-overlap L² for q = 0, p = 2; grid machinery (with the resolution gate) otherwise.
MpMainReport density_rate_mpmain(const PdmpModel& m, int q, double p, double R, const std::vector<int>& M_list,
                                 int M_ref, double t, int n, std::uint64_t seed, int workers = 0);

struct IbpCase {
  std::string f;
  double lhs = 0, rhs = 0;  // E f'(F), E f(F) F
  double se = 0;            // of the paired difference
  bool pass = false;        // |lhs − rhs| ≤ 3 se
};

struct IbpReport {
  std::vector<IbpCase> cases;
  double theta_norm = 0;   // ‖E(H'|F)‖₂ = ‖F‖₂
  double weight_norm = 0;  // ‖H'‖₂ for the non-minimal weight H' = F + V
  bool ordering_ok = false;
  bool pass = false;
};

/// F standard normal, G = 1, H = F; f ∈ {cos, x²/2, x³/3}.
IbpReport gauss_ibp_check(int n, std::uint64_t seed);

}  // namespace regint
