#include "regint/sde.hpp"

#include "regint/distances.hpp"
#include "regint/fit.hpp"
#include "regint/mixture.hpp"
#include "regint/orlicz.hpp"
#include "regint/parallel.hpp"
#include "regint/rng.hpp"
#include "regint/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace regint {

SdeModel logholder_model(double eps) {
  SdeModel m;
  m.name = "logholder";
  m.x0 = 0.0;
  m.eps = eps;
  m.C = 0.3;
  m.lambda_lo = 1.0;
  m.lambda_hi = 1.3 * 1.3;
  const double x0 = m.x0;
  m.sigma = [x0, eps](const PathState& s) {
    const double u = std::max(std::abs(s.x - x0), 1e-12);
    const double l = std::log(1.0 / u);
    const double v = l <= 1.0 ? 1.0 : std::pow(l, -(2.0 + eps));
    return 1.0 + 0.3 * v;
  };
  m.drift = [](const PathState& s) { return 0.2 * std::tanh(s.running_mean - s.x); };
  return m;
}

SdeModel constant_model(double s, double c) {
  SdeModel m;
  m.name = "constant";
  m.lambda_lo = m.lambda_hi = s * s;
  m.sigma = [s](const PathState&) { return s; };
  m.drift = [c](const PathState&) { return c; };
  return m;
}

SdeModel jump_control_model(double t_jump) {
  SdeModel m;
  m.name = "jump_control";
  m.lambda_lo = 1.0;
  m.lambda_hi = 4.0;
  m.sigma = [t_jump](const PathState& s) { return s.t < t_jump ? 1.0 : 2.0; };
  m.drift = [](const PathState&) { return 0.0; };
  return m;
}

const SdeSnapshot& SdeRun::snapshot(double delta) const {
  for (const auto& s : snapshots)
    if (std::abs(s.delta - delta) <= 1e-12 * std::max(1.0, delta)) return s;
  throw std::out_of_range("sde: delta " + std::to_string(delta) + " outside the stored range");
}

std::vector<double> SdeRun::x_delta(double delta) const {
  const SdeSnapshot& s = snapshot(delta);
  std::vector<double> out(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) out[size_t(i)] = s.x_before[size_t(i)] + s.sigma_before[size_t(i)] * s.dw[size_t(i)];
  return out;
}

SdeRun simulate_pathdep(const SdeModel& model, double T, double dt, int n, std::uint64_t seed,
                        int workers) {
  if (!(T > 0) || !(dt > 0) || n < 1) throw std::invalid_argument("simulate_pathdep: bad T, dt or n");
  const long steps = std::lround(T / dt);
  if (std::abs(double(steps) * dt - T) > 1e-9 * T) throw std::invalid_argument("simulate_pathdep: T/dt not an integer");
  if (workers <= 0) workers = default_workers();

  SdeRun run;
  run.T = T;
  run.dt = dt;
  run.n = n;
  run.seed = seed;
  run.x_T.assign(size_t(n), 0.0);

  std::vector<long> snap_step;
  auto add_snapshot = [&](double delta) {
    const long k = std::lround(delta / dt);
    if (std::abs(double(k) * dt - delta) > 1e-9 * delta) return;
    SdeSnapshot s;
    s.delta = delta;
    s.x_before.assign(size_t(n), 0.0);
    s.sigma_before.assign(size_t(n), 0.0);
    s.dw.assign(size_t(n), 0.0);
    run.snapshots.push_back(std::move(s));
    snap_step.push_back(steps - k);
  };
  add_snapshot(T);
  for (int j = 1; j < 64; ++j) {
    const double delta = std::ldexp(1.0, -j);
    if (delta > T / 2) continue;
    if (delta <= 10 * dt) break;
    add_snapshot(delta);
  }

  std::vector<double> s2min(static_cast<size_t>(n)), s2max(static_cast<size_t>(n));
  const double sq = std::sqrt(dt);
  parallel_for(n, workers, [&](long i) {
    auto g = stream_rng(seed, std::uint64_t(i));
    std::vector<double> hist;
    hist.reserve(size_t(steps) + 1);
    std::vector<double> w_at(run.snapshots.size(), 0.0);
    PathState st;
    st.history = &hist;
    st.x = model.x0;
    st.running_max = st.running_min = model.x0;
    double sum = 0, w = 0, lo2 = INFINITY, hi2 = -INFINITY;
    for (long k = 0; k < steps; ++k) {
      hist.push_back(st.x);
      sum += st.x;
      st.t = double(k) * dt;
      st.running_mean = sum / double(k + 1);
      st.running_max = std::max(st.running_max, st.x);
      st.running_min = std::min(st.running_min, st.x);
      const double sig = model.sigma(st);
      const double b = model.drift(st);
      if (!std::isfinite(sig) || !std::isfinite(b))
        throw std::domain_error("simulate_pathdep: coefficient returned NaN at t = " + std::to_string(st.t));
      lo2 = std::min(lo2, sig * sig);
      hi2 = std::max(hi2, sig * sig);
      for (size_t s = 0; s < snap_step.size(); ++s)
        if (snap_step[s] == k) {
          run.snapshots[s].x_before[size_t(i)] = st.x;
          run.snapshots[s].sigma_before[size_t(i)] = sig;
          w_at[s] = w;
        }
      const double dw = sq * std_normal(g);
      st.x += sig * dw + b * dt;
      w += dw;
    }
    run.x_T[size_t(i)] = st.x;
    for (size_t s = 0; s < snap_step.size(); ++s) run.snapshots[s].dw[size_t(i)] = w - w_at[s];
    s2min[size_t(i)] = lo2;
    s2max[size_t(i)] = hi2;
  });
  run.sigma2_min = *std::min_element(s2min.begin(), s2min.end());
  run.sigma2_max = *std::max_element(s2max.begin(), s2max.end());
  run.ellipticity_ok = run.sigma2_min >= model.lambda_lo * (1 - 1e-12) &&
                       run.sigma2_max <= model.lambda_hi * (1 + 1e-12);
  return run;
}

OneStep one_step_gaussian(const SdeRun& run, double delta, int max_deriv) {
  const SdeSnapshot& s = run.snapshot(delta);
  if (max_deriv < 0 || max_deriv > 16) throw std::invalid_argument("one_step_gaussian: max_deriv in [0, 16]");
  const size_t n = size_t(run.n);
  const double rd = std::sqrt(delta);
  double smin = INFINITY, smax = 0, xmin = INFINITY, xmax = -INFINITY;
  for (size_t i = 0; i < n; ++i) {
    const double sd = std::abs(s.sigma_before[i]) * rd;
    smin = std::min(smin, sd);
    smax = std::max(smax, sd);
    xmin = std::min(xmin, s.x_before[i]);
    xmax = std::max(xmax, s.x_before[i]);
  }
  if (!(smin > 0)) throw std::domain_error("one_step_gaussian: degenerate diffusion at T − δ");
  const double reach = 8.5;
  const double lo = xmin - (reach + 0.5) * smax, hi = xmax + (reach + 0.5) * smax;
  const double h0 = smin / 6.0;
  const int N = int(std::ceil((hi - lo) / h0)) + 1;
  if (N > 400001) throw std::domain_error("one_step_gaussian: y-grid under-resolves the mixture");

  std::vector<double> sds(n);
  for (size_t i = 0; i < n; ++i) sds[i] = std::abs(s.sigma_before[i]) * rd;
  OneStep out;
  out.max_deriv = max_deriv;
  out.samples = run.x_delta(delta);
  out.density = mixture_grid_function(gaussian_mixture_stack(s.x_before, sds, lo, hi, N, max_deriv, reach), lo, hi);
  const double mass = integrate(out.density);
  if (std::abs(mass - 1.0) > 1e-3 || out.density.values().minCoeff() < 0.0)
    throw std::logic_error("one_step_gaussian: mixture density lost positivity or unit mass");
  return out;
}

namespace {

void check_deltas(const std::vector<double>& deltas) {
  if (deltas.size() < 3) throw std::invalid_argument("sde: need at least three deltas");
  for (double d : deltas)
    if (!(d > 0 && d < 1)) throw std::invalid_argument("sde: deltas must lie in (0, 1)");
}

MeanSe coupled_error(const SdeRun& run, double delta) {
  const std::vector<double> xd = run.x_delta(delta);
  std::vector<double> a(xd.size());
  for (size_t i = 0; i < a.size(); ++i) a[i] = std::abs(run.x_T[i] - xd[i]);
  const MeanSe r = mean_se(a);
  if (r.mean > 0 && r.se > 0.2 * r.mean)
    throw std::runtime_error("sde: Monte Carlo error exceeds 20% of E|X_T - X_T^delta| at delta = " +
                             std::to_string(delta));
  return r;
}

}  // namespace

Ito6Report verify_ito6(const SdeRun& run, const std::vector<double>& deltas, double eps) {
  check_deltas(deltas);
  Ito6Report r;
  r.deltas = deltas;
  r.d1_ok = true;
  for (double d : deltas) {
    const MeanSe e = coupled_error(run, d);
    r.e_abs.push_back(e.mean);
    r.se.push_back(e.se);
    // Lumping onto fewer nodes can only lower d_1, and the coupling bounds W_1 ≥ d_1.
    const double d1 = dk_lp(empirical(run.x_T), empirical(run.x_delta(d)), 1);
    r.d1.push_back(d1);
    if (d1 > e.mean * (1 + 1e-6) + 1e-9) r.d1_ok = false;
    const double l = std::log(1.0 / d);
    r.normalized.push_back(e.mean / std::sqrt(d) * std::pow(l, 2.0 + eps));
  }
  const bool all_zero = std::all_of(r.normalized.begin(), r.normalized.end(), [](double v) { return v == 0; });
  r.max_over_median = all_zero ? 0.0 : max_over_median(r.normalized);
  r.bounded = all_zero || r.max_over_median <= 3.0;
  r.pass = r.bounded && r.d1_ok;
  return r;
}

Ito8Report verify_ito8(const SdeRun& run, const std::vector<double>& deltas, int m) {
  check_deltas(deltas);
  if (m < 1) throw std::invalid_argument("verify_ito8: m >= 1");
  Ito8Report r;
  r.deltas = deltas;
  std::vector<double> inv;
  for (double d : deltas) {
    const OneStep os = one_step_gaussian(run, d, 2 * m);
    r.norms.push_back(norm_1plus(os.density, 2 * m, 2.0 * m));
    inv.push_back(1.0 / d);
  }
  const LinearFit f = loglog_fit(inv, r.norms);
  r.slope = f.slope;
  r.r2 = f.r2;
  r.pass = r.slope <= 1.1 * m && r.r2 >= 0.95;
  return r;
}

BalanceReport balance_report(const SdeRun& run, const std::vector<double>& deltas, int m) {
  check_deltas(deltas);
  if (m < 1) throw std::invalid_argument("balance_report: m >= 1");
  BalanceReport r;
  r.deltas = deltas;
  std::sort(r.deltas.begin(), r.deltas.end(), std::greater<>());
  double env = 0;
  for (double d : r.deltas) {
    const OneStep os = one_step_gaussian(run, d, 2 * m);
    env = std::max(env, norm_1plus(os.density, 2 * m, 2.0 * m));
    r.lambda.push_back(env);
    const MeanSe e = coupled_error(run, d);
    r.e_abs.push_back(e.mean);
    const double l = std::log(1.0 / d);
    r.products.push_back(std::pow(env, 1.0 / (2 * m)) * e.mean * std::pow(l, 2.0 + 1.0 / (2 * m)));
  }
  const bool all_zero = std::all_of(r.products.begin(), r.products.end(), [](double v) { return v == 0; });
  r.max_over_median = all_zero ? 0.0 : max_over_median(r.products);
  r.pass = all_zero || r.max_over_median <= 3.0;
  return r;
}

}  // namespace regint
