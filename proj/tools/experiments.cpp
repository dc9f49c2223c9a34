#include "experiments.hpp"

#include "regint/distances.hpp"
#include "regint/fit.hpp"
#include "regint/hermite.hpp"
#include "regint/interp.hpp"
#include "regint/orlicz.hpp"
#include "regint/parallel.hpp"
#include "regint/pdmp.hpp"
#include "regint/rng.hpp"
#include "regint/sde.hpp"
#include "regint/stats.hpp"
#include "regint/superkernel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

namespace regint::cli {

namespace {

// ---------------------------------------------------------------- plumbing

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

/// Rows of pre-formatted cells; the first row is the header.
struct Table {
  std::vector<std::vector<std::string>> rows;

  explicit Table(std::vector<std::string> header) { rows.push_back(std::move(header)); }
  void add(std::vector<std::string> r) { rows.push_back(std::move(r)); }
  std::string str() const {
    std::string s;
    for (const auto& r : rows) {
      for (size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + r[i];
      s += "\n";
    }
    return s;
  }
};

template <typename T>
T get(const json& P, const std::string& key) {
  try {
    return P.at(key).get<T>();
  } catch (const json::exception& e) {
    throw config_error("field '" + key + "': " + e.what());
  }
}

std::vector<double> pow2_list(const std::vector<int>& exps) {
  std::vector<double> out;
  for (int j : exps) out.push_back(std::ldexp(1.0, -j));
  return out;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

using Runner = std::function<Outcome(const json&, std::uint64_t, int)>;

struct Entry {
  ExperimentInfo info;
  json defaults;
  Runner run;
};

const std::map<std::string, Entry>& registry();

// ---------------------------------------------------------------- hermite-check

Outcome run_hermite(const json& P, std::uint64_t seed, int) {
  Outcome o;
  bool all = true;
  for (const std::string c : get<std::vector<std::string>>(P, "checks")) {
    if (c == "orthonormality") {
      const int nmax = get<int>(P, "nmax"), order = get<int>(P, "order");
      const auto t0 = std::chrono::steady_clock::now();
      const Eigen::MatrixXd M = orthonormality_matrix(nmax, order);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      const double res = (M - Eigen::MatrixXd::Identity(nmax + 1, nmax + 1)).cwiseAbs().maxCoeff();
      const bool pass = res <= 1e-10 && secs < 5.0;
      o.metrics["orthonormality"] = {{"max_residual", res}, {"nmax", nmax}, {"order", order}, {"pass", pass}};
      all = all && pass;
    } else if (c == "eigen") {
      const int amax = get<int>(P, "eigen_alpha_max");
      Table t({"alpha", "residual"});
      double worst = 0;
      for (int a = 0; a <= amax; ++a) {
        const double r = eigen_check(a);
        worst = std::max(worst, r);
        t.add({std::to_string(a), num(r)});
      }
      const bool pass = worst <= 1e-5;
      o.metrics["eigen"] = {{"max_residual", worst}, {"alpha_max", amax}, {"pass", pass}};
      o.csvs.push_back({"eigen.csv", t.str()});
      all = all && pass;
    } else if (c == "partition") {
      const int N = get<int>(P, "partition_N"), samples = get<int>(P, "partition_samples");
      const BumpA a;
      const double top = std::pow(4.0, N - 1);
      auto g = stream_rng(seed, 0);
      double worst = 0;
      for (int i = 0; i < samples; ++i) {
        // endpoints first, then log-uniform draws
        const double t = i == 0 ? 1.0 : i == 1 ? top : std::exp(std::log(top) * uniform01(g));
        double s = 0;
        for (int n = 0; n <= N; ++n) s += a(t / std::pow(4.0, n));
        worst = std::max(worst, std::abs(s - 1.0));
      }
      const bool pass = worst <= 1e-10;
      o.metrics["partition"] = {{"max_error", worst}, {"N", N}, {"samples", samples}, {"pass", pass}};
      all = all && pass;
    } else if (c == "reconstruct") {
      const int N = get<int>(P, "reconstruct_N");
      const double shift = get<double>(P, "reconstruct_shift");
      const GridFunctiond f = GridFunctiond::sample(-10, 10, 2001, [&](double x) {
        return std::exp(-(x - shift) * (x - shift) / 2) / std::sqrt(2 * M_PI);
      });
      Table t({"N", "l2_error"});
      double err = 0;
      for (int n = 0; n <= N; ++n) {
        const GridFunctiond r = reconstruct(f, n);
        err = lp_norm(f.with_values(f.values() - r.values()), 2.0);
        t.add({std::to_string(n), num(err)});
      }
      const bool pass = err <= 1e-3;
      o.metrics["reconstruct"] = {{"l2_error", err}, {"N", N}, {"pass", pass}};
      o.csvs.push_back({"reconstruct.csv", t.str()});
      all = all && pass;
    } else if (c == "kernel_decay") {
      const int k = get<int>(P, "decay_k");
      const auto bands = get<std::vector<int>>(P, "decay_bands");
      Table t({"alpha", "n", "sup_abs", "decay_c"});
      json rows = json::array();
      bool pass = true;
      for (int alpha : get<std::vector<int>>(P, "decay_alpha")) {
        const KernelDecayReport r = kernel_decay(alpha, k, bands);
        const double target = alpha + 1.0;
        const bool ok = std::abs(r.slope - target) <= 0.15 * target;
        pass = pass && ok;
        for (size_t i = 0; i < r.bands.size(); ++i)
          t.add({std::to_string(alpha), std::to_string(r.bands[i]), num(r.sup_abs[i]), num(r.decay_c[i])});
        rows.push_back({{"alpha", alpha}, {"slope", r.slope}, {"target", target}, {"pass", ok}});
      }
      o.metrics["kernel_decay"] = {{"k", k}, {"fits", rows}, {"pass", pass}};
      o.csvs.push_back({"kernel_decay.csv", t.str()});
      all = all && pass;
    } else {
      throw config_error("field 'checks': unknown check '" + c +
                         "' (orthonormality, eigen, partition, reconstruct, kernel_decay)");
    }
  }
  o.pass = all;
  return o;
}

// ---------------------------------------------------------------- orlicz-props

Outcome run_orlicz(const json& P, std::uint64_t, int) {
  Outcome o;
  const YoungFunction e2 = e_p(2.0), el = e_log();
  json& m = o.metrics;
  bool all = true;
  auto record = [&](const char* key, json v, bool pass) {
    v["pass"] = pass;
    m[key] = std::move(v);
    all = all && pass;
  };

  const double inv2 = young_inverse(e2, 4.0), invl = young_inverse(el, 2.0 * std::log(2.0));
  record("young_inverse", {{"e2_at_4", inv2}, {"elog_at_2ln2", invl}},
         std::abs(inv2 - 2.0) <= 1e-8 && std::abs(invl - 1.0) <= 1e-8);

  double worst_ratio = 0, mono_violation = 0;
  for (double R = 1e4; R <= 1e8 * 1.0001; R *= std::pow(10.0, 0.25)) {
    worst_ratio = std::max(worst_ratio, beta(el, R) / std::log(R));
    mono_violation = std::max(mono_violation, beta(el, R) - beta(el, 4 * R));
  }
  const double b16 = beta(e2, 16.0);
  record("beta", {{"e2_at_16", b16}, {"elog_max_beta_over_lnR", worst_ratio}, {"max_decrease", mono_violation}},
         std::abs(b16 - 4.0) <= 1e-8 && worst_ratio <= 2.2 && mono_violation <= 0.0);

  double dbl = 0;
  for (double s = 1e-6; s < 1e6; s *= 1.1) dbl = std::max(dbl, el(2 * s) / el(s));
  record("elog_doubling", {{"max_e2s_over_es", dbl}, {"declared", el.doubling}}, dbl <= el.doubling);

  const int pts = get<int>(P, "indicator_points");
  const GridFunctiond ind = GridFunctiond::sample(-1, 2, pts, [](double x) { return x >= 0 && x <= 1 ? 1.0 : 0.0; });
  const double h = ind.spacing();
  const double lux2 = luxembourg_norm(ind, e2), luxl = luxembourg_norm(ind, el);
  const HolderPair hp = holder_orlicz(ind, ind, e2);
  record("luxembourg_indicator", {{"e2", lux2}, {"elog", luxl}, {"holder_lhs", hp.lhs}, {"holder_rhs", hp.rhs}},
         std::abs(lux2 - 1.0) <= 2 * h && std::abs(luxl - 1.31) <= 0.01 && std::abs(hp.lhs - 1.0) <= 2 * h &&
             hp.lhs <= hp.rhs * (1 + 1e-6) && std::abs(hp.rhs - lux2 * lux2) <= 1e-6);

  // ∫|f| ≤ C_*‖f‖_{e_log} and ‖f‖_{e_log} ≤ 2(1 ∨ ∫|f|(1+ln⁺|f|)) over a few shapes.
  const std::vector<std::pair<std::string, std::function<double(double)>>> shapes = {
      {"gauss", [](double x) { return std::exp(-x * x / 2) / std::sqrt(2 * M_PI); }},
      {"spike", [](double x) { return x >= 0 && x <= std::exp(-2.0) ? std::exp(2.0) : 0.0; }},
      {"wide", [](double x) { return 0.05 * std::exp(-std::abs(x) / 10); }},
      {"bimodal", [](double x) { return 3 * std::exp(-8 * (x - 1) * (x - 1)) + 2 * std::exp(-8 * (x + 1) * (x + 1)); }},
  };
  Table t({"shape", "l1", "elog_norm", "cstar_bound", "e24_bound"});
  bool e24 = true;
  for (const auto& [name, fn] : shapes) {
    const GridFunctiond f = GridFunctiond::sample(-60, 60, 240001, fn);
    const double l1 = lp_norm(f, 1.0), nl = luxembourg_norm(f, el);
    double ent = 0;
    for (Eigen::Index i = 0; i < f.size(); ++i) ent += std::abs(f[i]) * (1 + std::max(0.0, std::log(std::abs(f[i]) + 1e-300)));
    ent *= f.spacing();
    const double rhs24 = 2 * std::max(1.0, ent);
    e24 = e24 && l1 <= c_star() * nl * (1 + 1e-9) && nl <= rhs24 * (1 + 1e-9);
    t.add({name, num(l1), num(nl), num(c_star() * nl), num(rhs24)});
  }
  o.csvs.push_back({"elog_bounds.csv", t.str()});
  record("elog_bounds", {{"c_star", c_star()}, {"eps_star", eps_star()}}, e24);

  // ρ_{n,2}: one constant C with ‖ρ_{n,2}‖_e ≤ C 2^{−n} β_e(2^n) for n ≤ 6.
  Table tr({"n", "ratio_e2", "ratio_elog"});
  std::vector<double> r2, rl;
  for (int n = 0; n <= 6; ++n) {
    const GridFunctiond rho = rho_np(n, 2.0, -50, 50, 200001);
    const double s = std::ldexp(1.0, -n);
    r2.push_back(luxembourg_norm(rho, e2) / (s * beta(e2, 1.0 / s)));
    rl.push_back(luxembourg_norm(rho, el) / (s * beta(el, 1.0 / s)));
    tr.add({std::to_string(n), num(r2.back()), num(rl.back())});
  }
  o.csvs.push_back({"rho_np.csv", tr.str()});
  record("rho_np", {{"spread_e2", spread(r2)}, {"spread_elog", spread(rl)}}, spread(r2) <= 10 && spread(rl) <= 10);

  // Young convolution: ‖ρ∗f‖_e ≤ ‖ρ‖₁‖f‖_e for ρ ≥ 0.
  const GridFunctiond f = GridFunctiond::sample(-12, 12, 4801, [](double x) { return std::abs(x) < 1 ? 1 - std::abs(x) : 0.0; });
  const GridFunctiond rho = GridFunctiond::sample(-12, 12, 4801, [](double x) { return 0.7 * std::exp(-x * x * 4); });
  const GridFunctiond c = convolve(f, rho);
  double worst = 0;
  for (const auto& e : {e2, el})
    worst = std::max(worst, luxembourg_norm(c, e) / (lp_norm(rho, 1.0) * luxembourg_norm(f, e)));
  record("young_convolution", {{"max_ratio", worst}}, worst <= 1 + 1e-6);

  o.pass = all;
  return o;
}

// ---------------------------------------------------------------- distance-oracle

Outcome run_distance(const json& P, std::uint64_t seed, int) {
  Outcome o;
  const int instances = get<int>(P, "instances");
  const double step = get<double>(P, "step");
  Table t({"instance", "k", "nodes", "lp", "oracle", "gap_over_l1"});
  double worst = 0;
  bool above = false;
  std::vector<DkProblem> probs(static_cast<size_t>(instances));
  std::vector<double> lp(probs.size()), bf(probs.size());
  for (int i = 0; i < instances; ++i) {
    auto g = stream_rng(seed, std::uint64_t(i));
    DkProblem& p = probs[size_t(i)];
    const int n = 2 + i % 4;
    p.k = std::min(i % 4, n - 1);
    double x = 0;
    for (int j = 0; j < n; ++j) {
      x += 1.0 + 2.0 * uniform01(g);
      p.nodes.push_back(x);
      p.w.push_back(2.0 * uniform01(g) - 1.0);
    }
  }
  parallel_for(instances, default_workers(), [&](long i) {
    lp[size_t(i)] = dk_lp(probs[size_t(i)]);
    bf[size_t(i)] = dk_bruteforce(probs[size_t(i)], step);
  });
  for (size_t i = 0; i < probs.size(); ++i) {
    double l1 = 0;
    for (double w : probs[i].w) l1 += std::abs(w);
    const double gap = (lp[i] - bf[i]) / l1;
    worst = std::max(worst, gap);
    if (bf[i] > lp[i] + 1e-9) above = true;
    t.add({std::to_string(i), std::to_string(probs[i].k), std::to_string(probs[i].nodes.size()), num(lp[i]),
           num(bf[i]), num(gap)});
  }
  o.csvs.push_back({"oracle.csv", t.str()});
  const bool oracle_ok = worst <= step && !above;
  o.metrics["oracle"] = {{"instances", instances}, {"step", step}, {"max_gap_over_l1", worst},
                         {"oracle_above_lp", above}, {"pass", oracle_ok}};

  json atoms = json::array();
  double atom_err = 0;
  for (double L : get<std::vector<double>>(P, "two_atom_L")) {
    const double v = dk_lp(Samples{{0.0}, {1.0}}, Samples{{L}, {1.0}}, 1);
    atom_err = std::max(atom_err, std::abs(v - 2 * L / (L + 2)));
    atoms.push_back({{"L", L}, {"d1", v}, {"closed_form", 2 * L / (L + 2)}});
  }
  const bool atoms_ok = atom_err <= 1e-6;
  o.metrics["two_atom"] = {{"cases", atoms}, {"max_error", atom_err}, {"pass", atoms_ok}};

  const GridFunctiond f = GridFunctiond::sample(-8, 8, 3001, [](double x) { return std::exp(-x * x / 2) / std::sqrt(2 * M_PI); });
  const GridFunctiond g = GridFunctiond::sample(-8, 8, 3001, [](double x) {
    return std::exp(-(x - 0.5) * (x - 0.5) / 2) / std::sqrt(2 * M_PI);
  });
  const double tv = tv_distance(GridDensity{f}, GridDensity{g});
  const double tv_exact = 2 * (std::erfc(-0.25 / std::sqrt(2.0)) - 1);
  const double w1 = wasserstein1_1d(GridDensity{f}, GridDensity{g});
  const double d1 = dk_lp(GridDensity{f}, GridDensity{g}, 1);
  const bool gauss_ok = std::abs(tv - tv_exact) <= 1e-3 && std::abs(w1 - 0.5) <= 1e-4 && d1 <= w1 * 1.02;
  o.metrics["gaussian_shift"] = {{"tv", tv}, {"tv_closed_form", tv_exact}, {"w1", w1}, {"d1", d1}, {"pass", gauss_ok}};
  o.pass = oracle_ok && atoms_ok && gauss_ok;
  return o;
}

// ---------------------------------------------------------------- superkernel-rates

Outcome run_superkernel(const json& P, std::uint64_t, int) {
  Outcome o;
  const SuperKernel sk = build_superkernel();
  const std::vector<double> mom = kernel_moments(sk.phi, 8);
  double worst = 0;
  Table tm({"order", "moment"});
  for (int j = 0; j <= 8; ++j) {
    if (j > 0) worst = std::max(worst, std::abs(mom[size_t(j)]));
    tm.add({std::to_string(j), num(mom[size_t(j)])});
  }
  o.csvs.push_back({"moments.csv", tm.str()});
  const bool mom_ok = std::abs(mom[0] - 1.0) <= 1e-8 && worst <= 1e-6;
  o.metrics["kk1"] = {{"mass_error", mom[0] - 1.0}, {"max_abs_moment_1_8", worst}, {"tail_max", sk.tail_max},
                      {"pass", mom_ok}};

  const int k = get<int>(P, "k"), extra = get<int>(P, "n_minus_q");
  const std::vector<double> ds = pow2_list(get<std::vector<int>>(P, "delta_log2"));
  const double per = get<double>(P, "points_per_min_delta");
  Table t({"density", "delta", "kk2_dk", "kk3_norm"});
  json rows = json::array();
  bool rates_ok = true;
  for (const RoughDensity& rd : rough_test_family()) {
    const double h = *std::min_element(ds.begin(), ds.end()) / per;
    const GridFunctiond f = GridFunctiond::sample(rd.lo, rd.hi, int((rd.hi - rd.lo) / h) + 1, rd.pdf);
    const RateReport r2 = rate_kk2(f, rd.q, k, 0, e_p(2.0), ds);
    const RateReport r3 = rate_kk3(f, rd.q, rd.q + extra, 0, e_p(2.0), ds);
    const double lo2 = 0.85 * (rd.q + k), hi3 = 1.15 * extra;
    const double target = rd.q + k + extra;
    const bool ok = r2.slope >= lo2 && r3.slope <= hi3;
    rates_ok = rates_ok && ok;
    for (size_t i = 0; i < ds.size(); ++i) t.add({rd.name, num(ds[i]), num(r2.values[i]), num(r3.values[i])});
    rows.push_back({{"density", rd.name}, {"q", rd.q}, {"kk2_slope", r2.slope}, {"kk2_min", lo2},
                    {"kk3_slope", r3.slope}, {"kk3_max", hi3},
                    {"tradeoff_rel_gap", std::abs(r2.slope + r3.slope - target) / target}, {"pass", ok}});
  }
  o.csvs.push_back({"rates.csv", t.str()});
  o.metrics["rates"] = {{"k", k}, {"n_minus_q", extra}, {"families", rows}, {"pass", rates_ok}};
  o.pass = mom_ok && rates_ok;
  return o;
}

// ---------------------------------------------------------------- key-inequality

Outcome run_key(const json& P, std::uint64_t, int) {
  Outcome o;
  const int N = get<int>(P, "N");
  const int fam_size = get<int>(P, "family_size");
  std::vector<NamedDensity> fam = standard_test_family();
  if (fam_size < 1 || fam_size > int(fam.size())) throw config_error("field 'family_size': must lie in 1..10");
  fam.resize(size_t(fam_size));
  Table t({"q", "k", "m", "e", "density", "lhs", "pi", "ratio", "tail_ok"});
  json sets = json::array();
  bool all = true;
  for (const json& s : get<json>(P, "sets")) {
    InterpParams p;
    p.q = get<int>(s, "q");
    p.k = get<int>(s, "k");
    p.m = get<int>(s, "m");
    const std::string e = get<std::string>(s, "e");
    if (e == "e2") p.e = e_p(2.0);
    else if (e == "elog") p.e = e_log();
    else throw config_error("field 'sets[].e': expected \"e2\" or \"elog\"");
    p.N = N;
    const auto [lo, hi] = theta_window(p);
    const double th = 0.5 * (lo + hi);
    std::vector<double> ratios(fam.size());
    std::vector<KeyRatio> krs(fam.size());
    for (size_t i = 0; i < fam.size(); ++i) {
      const double dmin = std::pow(2.0, -th * p.N);
      const double h = std::min(0.004, dmin / 2.5);
      const GridFunctiond f = GridFunctiond::sample(-20, 20, int(40 / h) + 1, fam[i].pdf);
      krs[i] = key_inequality_ratio(f, super_kernel_family(f, th, p.N), p);
      ratios[i] = krs[i].ratio;
      t.add({std::to_string(p.q), std::to_string(p.k), std::to_string(p.m), e, fam[i].name, num(krs[i].lhs),
             num(krs[i].pi), num(krs[i].ratio), krs[i].report.tail_ok ? "1" : "0"});
    }
    const double sp = spread(ratios);
    const bool ok = sp <= 10.0;
    all = all && ok;
    sets.push_back({{"q", p.q}, {"k", p.k}, {"m", p.m}, {"e", e}, {"theta", th},
                    {"C_fit", *std::max_element(ratios.begin(), ratios.end())}, {"ratio_spread", sp}, {"pass", ok}});
  }
  o.csvs.push_back({"ratios.csv", t.str()});
  o.metrics["sets"] = sets;
  o.metrics["family_size"] = fam_size;
  o.pass = all;
  return o;
}

// ---------------------------------------------------------------- criterion

Outcome run_criterion(const json& P, std::uint64_t, int) {
  Outcome o;
  const SmoothingKernel K = kernel_of(build_superkernel());
  const std::vector<double> ds = pow2_list(get<std::vector<int>>(P, "delta_log2"));
  const double dmin = *std::min_element(ds.begin(), ds.end());
  const double h = dmin / get<double>(P, "points_per_min_delta");
  InterpParams p;
  p.q = 0;
  p.k = 1;
  p.m = get<int>(P, "m");
  p.e = e_p(2.0);
  const double eta0 = (p.q + p.k + class_tag(p.e).alpha) / (2.0 * p.m);

  struct Target {
    std::string name;
    std::function<double(double)> pdf;
    double L;
  };
  const std::vector<Target> targets = {
      {"triangle", [](double x) { return std::max(0.0, 1 - std::abs(x)); }, 6.0},
      {"gaussian", [](double x) { return std::exp(-x * x / 2) / std::sqrt(2 * M_PI); }, 10.0},
  };
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> samples;
  Table t({"target", "delta", "norm", "lambda", "dk"});
  for (const Target& tg : targets) {
    const GridFunctiond f = GridFunctiond::sample(-tg.L, tg.L, int(2 * tg.L / h) + 1, tg.pdf);
    std::vector<double> lam(ds.size()), dk(ds.size());
    parallel_for(long(ds.size()), default_workers(), [&](long i) {
      const GridFunctiond fd = smooth(f, K, ds[size_t(i)]);
      lam[size_t(i)] = sobolev_orlicz_norm(fd, 2 * p.m + p.q, 2 * p.m, p.e);
      dk[size_t(i)] = dk_lp(GridDensity{f}, GridDensity{fd}, p.k);
    });
    // λ(δ) := sup_{δ' ≥ δ} ‖f_δ'‖, the least non-increasing majorant of the measured norms.
    std::vector<size_t> idx(ds.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return ds[a] > ds[b]; });
    std::vector<double> env(ds.size());
    double run = 0;
    for (size_t i : idx) env[i] = run = std::max(run, lam[i]);
    for (size_t i = 0; i < ds.size(); ++i) t.add({tg.name, num(ds[i]), num(lam[i]), num(env[i]), num(dk[i])});
    samples[tg.name] = {env, dk};
  }
  o.csvs.push_back({"samples.csv", t.str()});

  struct Case {
    std::string name, target;
    double eta, kappa;
    bool expect;
  };
  const double above = get<double>(P, "eta_factor_above");
  const std::vector<Case> cases = {
      {"triangle_above_threshold", "triangle", above * eta0, 0.0, true},
      {"triangle_half_threshold", "triangle", 0.5 * eta0, 0.0, false},
      {"triangle_kappa_branch", "triangle", eta0, 1.0 + class_tag(p.e).gamma + eta0 + 0.5, true},
      {"gaussian_bounded", "gaussian", above * eta0, 0.0, true},
  };
  json rows = json::array();
  bool all = true;
  for (const Case& c : cases) {
    const auto& [lam, dk] = samples.at(c.target);
    const CriterionVerdict v = criterion_check(ds, lam, dk, p, c.eta, c.kappa);
    const bool ok = v.pass == c.expect;
    all = all && ok;
    rows.push_back({{"case", c.name}, {"eta", c.eta}, {"kappa", c.kappa}, {"verdict", v.pass ? "PASS" : "FAIL"},
                    {"expected", c.expect ? "PASS" : "FAIL"}, {"bounded", v.bounded}, {"branch", v.branch},
                    {"sup", v.sup}, {"as_expected", ok}});
  }
  o.metrics["eta_threshold"] = eta0;
  o.metrics["m"] = p.m;
  o.metrics["lambda_slope"] = loglog_fit(ds, samples.at("triangle").first).slope;
  o.metrics["dk_slope"] = loglog_fit(ds, samples.at("triangle").second).slope;
  o.metrics["cases"] = rows;
  o.pass = all;
  return o;
}

// ---------------------------------------------------------------- conv-rates

double triangle(double x) { return std::max(0.0, 1 - std::abs(x)); }

/// Triangle density convolved with N(0, ε²), in closed form.
double triangle_gauss(double x, double eps) {
  const auto R = [eps](double y) {
    const double z = y / eps;
    return y * 0.5 * std::erfc(-z / std::sqrt(2.0)) + eps * std::exp(-z * z / 2) / std::sqrt(2 * M_PI);
  };
  return R(x + 1) - 2 * R(x) + R(x - 1);
}

Outcome run_conv(const json& P, std::uint64_t, int) {
  Outcome o;
  const int n_lo = get<int>(P, "n_lo"), n_hi = get<int>(P, "n_hi");
  const double c = get<double>(P, "eps_scale"), box = get<double>(P, "box");
  if (n_hi - n_lo < 3) throw config_error("field 'n_hi': need at least four n values");
  const auto eps_of = [c](int n) { return std::sqrt(std::ldexp(1.0, -n) / c); };
  const double h = eps_of(n_hi) / 6;
  const int N = int(2 * box / h) + 1;
  const GridFunctiond f = GridFunctiond::sample(-box, box, N, triangle);
  std::vector<GridFunctiond> fn(size_t(n_hi - n_lo + 1));
  std::vector<double> eta;
  for (int n = n_lo; n <= n_hi; ++n) eta.push_back(std::ldexp(1.0, n));
  parallel_for(long(fn.size()), default_workers(), [&](long i) {
    const double eps = eps_of(n_lo + int(i));
    fn[size_t(i)] = GridFunctiond::sample(-box, box, N, [eps](double x) { return triangle_gauss(x, eps); });
  });
  InterpParams p;
  p.q = 0;
  p.k = 1;
  p.m = 1;
  p.e = e_p(2.0);
  const ConvReport r = conv_rate_check(f, fn, eta, get<double>(P, "alpha"), p);
  const ConvElogReport el = conv_elog_check(f, fn, eta, get<double>(P, "alpha_elog"), p);
  Table t({"n", "eta", "err_p", "xnorm_p", "dk", "err_elog", "envelope_elog", "xnorm_1plus"});
  for (size_t i = 0; i < eta.size(); ++i)
    t.add({std::to_string(n_lo + int(i)), num(eta[i]), num(r.err[i]), num(r.xnorm[i]), num(r.dk[i]), num(el.err[i]),
           num(el.envelope[i]), num(el.xnorm[i])});
  o.csvs.push_back({"conv.csv", t.str()});
  o.metrics["lp_branch"] = {{"theta_pred", r.theta_pred}, {"theta_meas", finite_or_null(r.theta_meas)},
                            {"pass", r.pass}};
  o.metrics["elog_branch"] = {{"c_first", el.c_first}, {"c_max", el.c_max}, {"pass", el.pass}};
  o.metrics["grid_points"] = N;
  o.pass = r.pass && el.pass;
  return o;
}

// ---------------------------------------------------------------- besov

Outcome run_besov(const json& P, std::uint64_t, int) {
  Outcome o;
  const std::vector<double> ds = get<std::vector<double>>(P, "deltas");
  const GridFunctiond g = GridFunctiond::sample(-8, 8, get<int>(P, "gauss_points"),
                                               [](double x) { return std::exp(-x * x / 2) / std::sqrt(2 * M_PI); });
  const BesovReport bg = besov_estimate(g, 2.0, ds);
  const bool g_ok = bg.estimate >= 0.9;
  o.metrics["gaussian"] = {{"s_i", bg.s_i}, {"s_ii", bg.s_ii}, {"estimate", bg.estimate}, {"pass", g_ok}};
  // Derivative of the triangle density: a step function, smoothness 1/p in B^{s,p}.
  const GridFunctiond st = GridFunctiond::sample(-3, 3, get<int>(P, "step_points"),
                                                [](double x) { return x < -1 || x > 1 ? 0.0 : (x < 0 ? 1.0 : -1.0); });
  json rows = json::array();
  bool s_ok = true;
  Table t({"function", "p", "delta", "norm_i", "norm_ii"});
  for (size_t i = 0; i < ds.size(); ++i) t.add({"gaussian", "2", num(ds[i]), num(bg.norms_i[i]), num(bg.norms_ii[i])});
  for (double p : get<std::vector<double>>(P, "p_list")) {
    const BesovReport b = besov_estimate(st, p, ds);
    const bool ok = std::abs(b.estimate - 1.0 / p) <= 0.15;
    s_ok = s_ok && ok;
    rows.push_back({{"p", p}, {"s_i", b.s_i}, {"s_ii", b.s_ii}, {"estimate", b.estimate}, {"expected", 1.0 / p},
                    {"pass", ok}});
    for (size_t i = 0; i < ds.size(); ++i) t.add({"step", num(p), num(ds[i]), num(b.norms_i[i]), num(b.norms_ii[i])});
  }
  o.csvs.push_back({"besov.csv", t.str()});
  o.metrics["triangle_derivative"] = rows;
  o.pass = g_ok && s_ok;
  return o;
}

// ---------------------------------------------------------------- sde-logholder

Outcome run_sde(const json& P, std::uint64_t seed, int workers) {
  Outcome o;
  const int n = get<int>(P, "paths"), m = get<int>(P, "m");
  const double T = get<double>(P, "T"), dt = std::ldexp(1.0, -get<int>(P, "dt_log2"));
  const double eps = get<double>(P, "eps");
  const std::vector<double> ds = pow2_list(get<std::vector<int>>(P, "delta_log2"));

  const SdeRun run = simulate_pathdep(logholder_model(eps), T, dt, n, seed, workers);
  const Ito6Report i6 = verify_ito6(run, ds, eps);
  const Ito8Report i8 = verify_ito8(run, ds, m);
  const BalanceReport bal = balance_report(run, ds, m);

  Table t({"model", "delta", "e_abs", "d1", "lambda", "product"});
  for (size_t i = 0; i < bal.deltas.size(); ++i)
    t.add({"logholder", num(bal.deltas[i]), num(bal.e_abs[i]), "", num(bal.lambda[i]), num(bal.products[i])});
  Table t6({"delta", "e_abs", "se", "d1", "normalized", "ito8_norm"});
  for (size_t i = 0; i < ds.size(); ++i)
    t6.add({num(ds[i]), num(i6.e_abs[i]), num(i6.se[i]), num(i6.d1[i]), num(i6.normalized[i]), num(i8.norms[i])});

  o.metrics["paths"] = n;
  o.metrics["dt"] = dt;
  o.metrics["ellipticity_ok"] = run.ellipticity_ok;
  o.metrics["sigma2_range"] = {run.sigma2_min, run.sigma2_max};
  o.metrics["ito6"] = {{"max_over_median", i6.max_over_median}, {"d1_ok", i6.d1_ok}, {"pass", i6.pass}};
  o.metrics["ito8"] = {{"slope", i8.slope}, {"r2", i8.r2}, {"bound", 1.1 * m}, {"pass", i8.pass}};
  o.metrics["balance"] = {{"m", m}, {"max_over_median", bal.max_over_median}, {"pass", bal.pass}};

  bool control_fails = true;
  if (get<bool>(P, "control")) {
    const double tj = T - std::ldexp(1.0, -get<int>(P, "control_jump_log2"));
    const SdeRun neg = simulate_pathdep(jump_control_model(tj), T, dt, n, seed, workers);
    const BalanceReport nb = balance_report(neg, ds, m);
    for (size_t i = 0; i < nb.deltas.size(); ++i)
      t.add({"jump_control", num(nb.deltas[i]), num(nb.e_abs[i]), "", num(nb.lambda[i]), num(nb.products[i])});
    control_fails = !nb.pass;
    o.metrics["control"] = {{"t_jump", tj}, {"max_over_median", nb.max_over_median}, {"balance_pass", nb.pass},
                            {"fails_as_expected", control_fails}};
  }
  o.csvs.push_back({"balance.csv", t.str()});
  o.csvs.push_back({"ito6.csv", t6.str()});
  o.pass = run.ellipticity_ok && bal.pass && i6.pass && control_fails;
  return o;
}

// ---------------------------------------------------------------- pdmp-sim

Outcome run_pdmp_sim(const json& P, std::uint64_t seed, int workers) {
  Outcome o;
  const PdmpModel m = default_pdmp_model(get<double>(P, "r"), 1.0);
  const int n = get<int>(P, "paths");
  const HypothesisReport hyp = validate_hypotheses(m, get<int>(P, "hypothesis_M"));
  json hj = json::array();
  for (const auto& c : hyp.checks)
    hj.push_back({{"name", c.name}, {"pass", c.pass}, {"worst", c.worst}, {"z", c.z}, {"x", c.x}});
  o.metrics["b"] = m.b;
  o.metrics["hypotheses"] = hj;

  Table t({"M", "x0", "t", "ks_statistic", "p_value", "mean_indicator", "mean_smooth"});
  json rows = json::array();
  int passed = 0;
  const json cfgs = get<json>(P, "configs");
  for (size_t i = 0; i < cfgs.size(); ++i) {
    const int M = get<int>(cfgs[i], "M");
    const double x0 = get<double>(cfgs[i], "x0"), tt = get<double>(cfgs[i], "t");
    const std::uint64_t s = mix64(seed ^ (0x100 + i));
    const std::vector<double> a = simulate_indicator(m, M, x0, tt, n, s, workers);
    const std::vector<double> b = simulate_smooth(m, M, x0, tt, n, s, workers);
    const KsResult ks = ks_two_sample(a, b);
    const bool ok = ks.p_value >= 0.01;
    passed += ok;
    const double ma = mean_se(a).mean, mb = mean_se(b).mean;
    t.add({std::to_string(M), num(x0), num(tt), num(ks.statistic), num(ks.p_value), num(ma), num(mb)});
    rows.push_back({{"M", M}, {"x0", x0}, {"t", tt}, {"ks_statistic", ks.statistic}, {"p_value", ks.p_value},
                    {"pass", ok}});
  }
  o.csvs.push_back({"ks.csv", t.str()});
  o.metrics["ks"] = rows;
  o.metrics["ks_passed"] = passed;
  o.metrics["ks_total"] = int(cfgs.size());
  json um = json::array();
  for (int M : {2, 3, 4, 6, 8}) um.push_back({{"M", M}, {"U_M", u_M(m, M)}, {"lambda_M", lambda_M(m, M)}});
  o.metrics["U_M"] = um;
  o.pass = passed == int(cfgs.size());
  return o;
}

// ---------------------------------------------------------------- pdmp-rates

Outcome run_pdmp_rates(const json& P, std::uint64_t seed, int workers) {
  Outcome o;
  const std::string check = get<std::string>(P, "check");
  const auto Ms = get<std::vector<int>>(P, "M_list");
  const int M_ref = get<int>(P, "M_ref"), n = get<int>(P, "paths");
  const double t = get<double>(P, "t");
  if (check == "a14") {
    const PdmpModel m = default_pdmp_model(get<double>(P, "r"), 1.0);
    const A14Report r = rate_a14(m, [](double x) { return std::min(1.0, std::abs(x)); }, Ms, M_ref, t,
                                 get<double>(P, "x0"), n, seed, workers);
    Table tb({"M", "error", "se", "upper", "noise_dominated"});
    for (size_t i = 0; i < r.M.size(); ++i)
      tb.add({std::to_string(r.M[i]), num(r.error[i]), num(r.se[i]), num(r.upper[i]), r.noise_dominated[i] ? "1" : "0"});
    o.csvs.push_back({"a14.csv", tb.str()});
    o.metrics["a14"] = {{"slope", r.slope}, {"slope_raw", r.slope_raw}, {"predicted", r.predicted},
                        {"bound", 0.8 * r.predicted}, {"pass", r.pass}};
    o.pass = r.pass;
  } else if (check == "mpmain") {
    const PdmpModel m = default_pdmp_model(get<double>(P, "r"), 1.0);
    const MpMainReport r = density_rate_mpmain(m, get<int>(P, "q"), get<double>(P, "p"), get<double>(P, "R"), Ms,
                                               M_ref, t, n, seed, workers);
    Table tb({"M", "sigma", "norm", "a15_sup"});
    for (size_t i = 0; i < r.M.size(); ++i)
      tb.add({std::to_string(r.M[i]), num(r.sigma[i]), num(r.norm[i]), num(r.a15_sup[i])});
    o.csvs.push_back({"mpmain.csv", tb.str()});
    o.metrics["mpmain"] = {{"slope", r.slope}, {"predicted", r.predicted}, {"bound", -0.7 * r.predicted},
                           {"pass_rate", r.pass_rate}, {"a15_exponent", r.a15_exponent},
                           {"a15_bound", 1.2 * (2 + 1)}, {"pass_a15", r.pass_a15}};
    o.pass = r.pass_rate && r.pass_a15;
  } else {
    throw config_error("field 'check': expected \"a14\" or \"mpmain\"");
  }
  o.metrics["check"] = check;
  return o;
}

// ---------------------------------------------------------------- ibp-check

Outcome run_ibp(const json& P, std::uint64_t seed, int) {
  Outcome o;
  const IbpReport r = gauss_ibp_check(get<int>(P, "samples"), seed);
  json rows = json::array();
  for (const auto& c : r.cases)
    rows.push_back({{"f", c.f}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"se", c.se}, {"pass", c.pass}});
  o.metrics["cases"] = rows;
  o.metrics["theta_norm"] = r.theta_norm;
  o.metrics["weight_norm"] = r.weight_norm;
  o.metrics["ordering_ok"] = r.ordering_ok;
  o.pass = r.pass;
  return o;
}

// ---------------------------------------------------------------- table

const std::map<std::string, Entry>& registry() {
  static const std::map<std::string, Entry> reg = [] {
    std::map<std::string, Entry> r;
    auto add = [&](std::string name, std::string desc, std::string anchor, json defaults, Runner run) {
      r[name] = Entry{{name, std::move(desc), std::move(anchor)}, std::move(defaults), std::move(run)};
    };
    add("besov", "Besov index of a smooth density and of a step function from mollifier slopes", "(Int3)",
        {{"deltas", {0.2, 0.1, 0.05, 0.025, 0.0125}}, {"p_list", {2.0, 3.0, 1.5}}, {"gauss_points", 64001},
         {"step_points", 24001}},
        run_besov);
    add("conv-rates", "Convergence rate of Gaussian smoothings of the triangle density, L^p and e_log branches",
        "(cbis3p), (cbis3elog)",
        {{"n_lo", 12}, {"n_hi", 19}, {"eps_scale", 0.75}, {"box", 2.5}, {"alpha", 2.5}, {"alpha_elog", 2.0}},
        run_conv);
    add("criterion", "Balance criterion on super-kernel smoothings: above, below and at the eta threshold",
        "(Balance), (i2), (i3)",
        {{"m", 2}, {"delta_log2", {2, 3, 4, 5, 6, 7}}, {"points_per_min_delta", 12.0}, {"eta_factor_above", 1.0667}},
        run_criterion);
    add("distance-oracle", "d_k linear program against exhaustive search, two-atom closed form, TV and W1",
        "(O6)", {{"instances", 50}, {"step", 0.05}, {"two_atom_L", {0.5, 1.0, 2.0, 5.0}}}, run_distance);
    add("hermite-check", "Hermite orthonormality, eigen-relation, partition of unity, reconstruction, kernel decay",
        "(Her0), (Her1), (Her3)",
        {{"checks", {"orthonormality", "eigen", "partition", "reconstruct", "kernel_decay"}},
         {"nmax", 40}, {"order", 200}, {"eigen_alpha_max", 10}, {"partition_N", 5}, {"partition_samples", 200},
         {"reconstruct_N", 4}, {"reconstruct_shift", 0.3}, {"decay_alpha", {0, 1}}, {"decay_k", 3},
         {"decay_bands", {2, 3, 4}}},
        run_hermite);
    add("ibp-check", "Gaussian integration-by-parts identity and weight ordering", "(Lp5')", {{"samples", 1000000}},
        run_ibp);
    add("key-inequality", "Ratio of the q-norm to the interpolation functional across ten densities",
        "(O7), (Oo10bis)",
        {{"N", 5}, {"family_size", 10},
         {"sets", json::array({{{"q", 0}, {"k", 1}, {"m", 1}, {"e", "e2"}},
                               {{"q", 1}, {"k", 1}, {"m", 2}, {"e", "e2"}},
                               {{"q", 0}, {"k", 1}, {"m", 2}, {"e", "elog"}}})}},
        run_key);
    add("orlicz-props", "Young inverses, beta growth, Luxembourg norms, Hoelder and e_log bounds",
        "(O1), (O2), (O3), (E1), (E24)", {{"indicator_points", 3001}}, run_orlicz);
    add("pdmp-rates", "Truncation rate of E f(X_t^M) and the density rate in M", "(a14), (a15), (MP-main)",
        {{"check", "a14"}, {"r", 6.0}, {"M_list", {2, 3, 4, 6, 8}}, {"M_ref", 32}, {"t", 1.0}, {"x0", 0.5},
         {"paths", 1000000}, {"q", 0}, {"p", 2.0}, {"R", 2.0}},
        run_pdmp_rates);
    add("pdmp-sim", "Law equivalence of the indicator and smooth jump representations (KS tests)",
        "(eq3), (eq4), (condXM)",
        {{"r", 6.0}, {"paths", 100000}, {"hypothesis_M", 4},
         {"configs", json::array({{{"M", 2}, {"x0", 0.0}, {"t", 1.0}},
                                  {{"M", 3}, {"x0", 0.5}, {"t", 1.0}},
                                  {{"M", 4}, {"x0", -1.0}, {"t", 0.5}},
                                  {{"M", 2}, {"x0", 1.0}, {"t", 2.0}},
                                  {{"M", 6}, {"x0", 0.0}, {"t", 1.0}}})}},
        run_pdmp_sim);
    add("sde-logholder", "Balance of smoothness blow-up and one-step error for the log-Hoelder SDE",
        "(Ito6), (Ito8), (Llog)",
        {{"paths", 100000}, {"T", 1.0}, {"dt_log2", 13}, {"m", 4}, {"eps", 0.5},
         {"delta_log2", {4, 5, 6, 7, 8, 9}}, {"control", true}, {"control_jump_log2", 10}},
        run_sde);
    add("superkernel-rates", "Super-kernel moments and the smoothing rate pair on the rough family",
        "(kk1), (kk2), (kk3)",
        {{"k", 1}, {"n_minus_q", 2}, {"delta_log2", {2, 3, 4, 5, 6, 7}}, {"points_per_min_delta", 12.0}},
        run_superkernel);
    return r;
  }();
  return reg;
}

const Entry& entry(const std::string& name) {
  const auto& reg = registry();
  const auto it = reg.find(name);
  if (it == reg.end())
    throw config_error("unknown experiment '" + name + "'; valid experiments: " + experiment_names());
  return it->second;
}

bool compatible(const json& def, const json& v) {
  if (def.is_number()) return v.is_number() && (!def.is_number_integer() || v.is_number_integer());
  if (def.is_array()) return v.is_array();
  if (def.is_object()) return v.is_object();
  return def.type() == v.type();
}

std::string type_name(const json& def) {
  if (def.is_number_integer()) return "integer";
  if (def.is_number()) return "number";
  return def.type_name();
}

std::string utc_stamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << text;
  if (!f) throw std::runtime_error("write failed for " + p.string());
}

}  // namespace

const std::vector<ExperimentInfo>& experiment_table() {
  static const std::vector<ExperimentInfo> t = [] {
    std::vector<ExperimentInfo> v;
    for (const auto& [name, e] : registry()) v.push_back(e.info);  // std::map keeps names sorted
    return v;
  }();
  return t;
}

bool is_experiment(const std::string& name) { return registry().count(name) > 0; }

std::string experiment_names() {
  std::string s;
  for (const auto& e : experiment_table()) s += (s.empty() ? "" : ", ") + e.name;
  return s;
}

std::string list_experiments() {
  std::ostringstream os;
  char buf[512];
  for (const auto& e : experiment_table()) {
    std::snprintf(buf, sizeof buf, "%-18s %-34s %s\n", e.name.c_str(), e.anchor.c_str(), e.description.c_str());
    os << buf;
  }
  return os.str();
}

json parse_config(const std::string& text, const std::string& origin) {
  try {
    json j = json::parse(text);
    if (!j.is_object()) throw config_error(origin + ": top level must be a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    // byte offset → line and column
    const size_t pos = std::min(e.byte, text.size());
    size_t line = 1, col = 1;
    for (size_t i = 0; i + 1 < pos; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw config_error(origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what());
  }
}

json default_params(const std::string& experiment) { return entry(experiment).defaults; }

json merge_params(const std::string& experiment, const json& user) {
  json p = default_params(experiment);
  if (user.is_null()) return p;
  if (!user.is_object()) throw config_error("config: parameter block must be a JSON object");
  for (const auto& [k, v] : user.items()) {
    if (!p.contains(k)) {
      std::string known;
      for (const auto& [dk, dv] : p.items()) known += (known.empty() ? "" : ", ") + dk;
      throw config_error("field '" + k + "': unknown for " + experiment + " (fields: " + known + ")");
    }
    if (!compatible(p[k], v))
      throw config_error("field '" + k + "': expected " + type_name(p[k]) + ", got " + v.type_name());
    p[k] = v;
  }
  return p;
}

Outcome run_experiment(const std::string& experiment, const json& params, std::uint64_t seed, int workers) {
  const Entry& e = entry(experiment);
  const int prev = worker_override();
  set_default_workers(workers);
  try {
    Outcome o = e.run(params, seed, workers > 0 ? workers : default_workers());
    set_default_workers(prev);
    return o;
  } catch (...) {
    set_default_workers(prev);
    throw;
  }
}

void validate_result(const json& r) {
  auto need = [&](const char* key, bool ok) {
    if (!r.contains(key)) throw config_error(std::string("result.json: missing key '") + key + "'");
    if (!ok) throw config_error(std::string("result.json: key '") + key + "' has the wrong type");
  };
  if (!r.is_object()) throw config_error("result.json: not an object");
  need("schema_version", r.contains("schema_version") && r["schema_version"].is_number_integer());
  if (r["schema_version"] != kSchemaVersion) throw config_error("result.json: unsupported schema_version");
  need("experiment", r.contains("experiment") && r["experiment"].is_string());
  need("verdict", r.contains("verdict") && r["verdict"].is_string());
  if (r["verdict"] != "PASS" && r["verdict"] != "FAIL") throw config_error("result.json: verdict must be PASS or FAIL");
  need("metrics", r.contains("metrics") && r["metrics"].is_object());
  need("artifacts", r.contains("artifacts") && r["artifacts"].is_object());
  const json& a = r["artifacts"];
  if (!a.contains("files") || !a["files"].is_array()) throw config_error("result.json: artifacts.files must be an array");
  if (!a.contains("timestamp") || !a["timestamp"].is_string())
    throw config_error("result.json: artifacts.timestamp must be a string");
  for (const auto& [k, v] : r.items())
    if (k != "schema_version" && k != "experiment" && k != "verdict" && k != "metrics" && k != "artifacts")
      throw config_error("result.json: unexpected top-level key '" + k + "'");
}

RunArtifacts run_command(const RunRequest& req, std::ostream& out, std::ostream& err) {
  RunArtifacts ra;
  try {
    if (!is_experiment(req.experiment))
      throw config_error("unknown experiment '" + req.experiment + "'; valid experiments: " + experiment_names());
    json user = json::object();
    if (!req.config_path.empty()) {
      std::ifstream f(req.config_path, std::ios::binary);
      if (!f) throw config_error("cannot read config " + req.config_path);
      std::stringstream ss;
      ss << f.rdbuf();
      user = parse_config(ss.str(), req.config_path);
    }
    const json params = merge_params(req.experiment, user);

    std::string out_dir = req.out_dir;
    if (out_dir.empty()) {
      const char* env = std::getenv("TOOL_OUT");
      out_dir = env && *env ? env : "runs";
    }
    const std::filesystem::path base = std::filesystem::path(out_dir) / req.experiment;
    std::filesystem::create_directories(base);
    const std::string stamp = utc_stamp();
    std::filesystem::path dir = base / stamp;
    for (int k = 1; std::filesystem::exists(dir); ++k) dir = base / (stamp + "-" + std::to_string(k));
    std::filesystem::create_directories(dir);

    const json config = {{"experiment", req.experiment}, {"seed", req.seed}, {"workers", req.workers},
                         {"params", params}};
    write_file(dir / "config.json", config.dump(2) + "\n");

    const auto t0 = std::chrono::steady_clock::now();
    const Outcome o = run_experiment(req.experiment, params, req.seed, req.workers);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    json files = json::array({"config.json", "result.json"});
    for (const Csv& c : o.csvs) {
      write_file(dir / c.name, c.text);
      files.push_back(c.name);
    }
    json result = {{"schema_version", kSchemaVersion},
                   {"experiment", req.experiment},
                   {"verdict", o.pass ? "PASS" : "FAIL"},
                   {"metrics", o.metrics},
                   {"artifacts", {{"run_dir", dir.string()}, {"timestamp", stamp}, {"elapsed_seconds", secs},
                                  {"files", files}}}};
    validate_result(result);
    write_file(dir / "result.json", result.dump(2) + "\n");
    write_file(base / "latest", dir.filename().string() + "\n");
    out << req.experiment << ": " << result["verdict"].get<std::string>() << " (" << dir.string() << ")\n";
    ra.exit_code = o.pass ? 0 : 2;
    ra.run_dir = dir;
    ra.result = std::move(result);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    ra.exit_code = 1;
  }
  return ra;
}

}  // namespace regint::cli
