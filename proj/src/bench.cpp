#include "manoc/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "manoc/hjb.hpp"
#include "manoc/jacobi.hpp"
#include "manoc/value.hpp"

namespace manoc {
namespace {

struct Stopwatch {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double lap() {
    auto t1 = std::chrono::steady_clock::now();
    double s = std::chrono::duration<double>(t1 - t0).count();
    t0 = t1;
    return s;
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string slug(std::string s) {
  for (char& c : s)
    if (c == '-') c = '_';
  return s;
}

struct LineFit {
  double slope = 0.0, intercept = 0.0, r2 = 1.0;
};

LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  const size_t n = xs.size();
  double sx = 0, sy = 0;
  for (size_t i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / double(n), my = sy / double(n);
  double sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  LineFit f;
  f.slope = sxy / std::max(sxx, 1e-300);
  f.intercept = my - f.slope * mx;
  double ss_res = 0;
  for (size_t i = 0; i < n; ++i) {
    const double r = ys[i] - (f.intercept + f.slope * xs[i]);
    ss_res += r * r;
  }
  f.r2 = syy > 0 ? 1.0 - ss_res / syy : 1.0;
  return f;
}

LineFit fit_loglog(const std::vector<double>& xs,
                   const std::vector<double>& ys) {
  std::vector<double> lx, ly;
  for (size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] > 0 && ys[i] > 0) {
      lx.push_back(std::log(xs[i]));
      ly.push_back(std::log(ys[i]));
    }
  }
  if (lx.size() < 2) throw ConfigError("log-log fit needs two positive points");
  return fit_line(lx, ly);
}

// Collected experiment output, written under spec.out_dir on completion.
struct Artifacts {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::string plot_title;
  std::vector<PlotSeries> series;
  bool log_x = false, log_y = false;
};

void add_row(RunReport& rep, const std::string& id, bool pass,
             const std::string& detail) {
  rep.criteria.push_back(CriterionRow{id, detail, pass});
}

Problem problem_or(const ExperimentSpec& spec, const std::string& fallback) {
  return make_problem(spec.problem.empty() ? fallback : spec.problem);
}

// sum_i P_x(D_{sigma_i} sigma_i), the covariant half of the corrected drift
// (doubled out of stratonovich_drift, which carries the 1/2).
Vec diffusion_correction(const ControlledDynamics& dyn,
                         const ExtensionConfig& ext, double t, const Vec& x,
                         const CtrlVec& u) {
  const Vec b = eval_dynamics(dyn, t, x, u).drift;
  return 2.0 * (stratonovich_drift(dyn, ext, t, x, u) - b);
}

// ---------------------------------------------------------------------------
// geometry-certify: exp/log roundtrips, transport isometry, log reversal on
// the closed-form models, plus the arc/chord equivalence band on the sphere.
// ---------------------------------------------------------------------------
void run_geometry_certify(const ExperimentSpec& spec, RunReport& rep,
                          Artifacts& art) {
  const int n = int(spec.param("n_samples", 1e4));
  std::vector<Manifold> models;
  if (spec.problem.empty()) {
    models = {Manifold::circle(), Manifold::sphere2()};
  } else {
    models = {Manifold::by_name(spec.problem)};
  }
  const std::uint64_t s = spec.seed;

  art.header = {"model_index", "worst_roundtrip", "worst_distance",
                "worst_isometry", "worst_reversal"};
  Stopwatch watch;
  double wr = 0, wd = 0, wi = 0, wv = 0;
  for (size_t mi = 0; mi < models.size(); ++mi) {
    const Manifold& M = models[mi];
    const double imax = 0.9 * M.injectivity_radius();
    double mr = 0, md = 0, miso = 0, mrev = 0;
    for (int i = 0; i < n; ++i) {
      const Vec x = M.sample_point(s + 101, std::uint64_t(i));
      Vec dir = M.sample_tangent(x, s + 103, std::uint64_t(i));
      const double dn = dir.norm();
      if (dn < 1e-12) continue;
      const double len =
          (0.001 + 0.999 * rng::uniform(s + 107, std::uint64_t(i), 0, 0)) *
          imax;
      const Vec v = (len / dn) * dir;
      const Vec y = M.exp(x, v);
      mr = std::max(mr, (M.log(x, y) - v).norm());
      md = std::max(md, std::abs(M.distance(x, y) - len));
      const Vec w = M.sample_tangent(x, s + 109, std::uint64_t(i));
      miso = std::max(miso, std::abs(M.transport(x, y, w).norm() - w.norm()));
      const Vec rev = M.transport(x, y, M.log(x, y)) + M.log(y, x);
      mrev = std::max(mrev, rev.norm());
    }
    art.rows.push_back({double(mi), mr, md, miso, mrev});
    wr = std::max(wr, mr);
    wd = std::max(wd, md);
    wi = std::max(wi, miso);
    wv = std::max(wv, mrev);
  }
  const double roundtrip_seconds = watch.lap();

  rep.metrics["worst_roundtrip"] = wr;
  rep.metrics["worst_distance"] = wd;
  rep.metrics["worst_isometry"] = wi;
  rep.metrics["worst_reversal"] = wv;
  rep.metrics["roundtrip_seconds"] = roundtrip_seconds;
  add_row(rep, "exp-log-roundtrip", wr <= 1e-8,
          "worst ||log(exp(v)) - v|| = " + fmt(wr) + " (bound 1e-8)");
  add_row(rep, "geodesic-distance", wd <= 1e-10,
          "worst |rho - ||v||| = " + fmt(wd) + " (bound 1e-10)");
  add_row(rep, "transport-isometry", wi <= 1e-10,
          "worst | ||Lw|| - ||w|| | = " + fmt(wi) + " (bound 1e-10)");
  add_row(rep, "log-reversal", wv <= 1e-10,
          "worst ||L log_x(y) + log_y(x)|| = " + fmt(wv) + " (bound 1e-10)");
  add_row(rep, "roundtrip-runtime", roundtrip_seconds < 5.0,
          fmt(roundtrip_seconds) + " s (budget 5 s)");

  // Arc/chord ratio band; only meaningful on the sphere model.
  bool has_sphere = false;
  for (const auto& M : models) has_sphere |= M.name() == "sphere2";
  if (!has_sphere) return;
  const Manifold S = Manifold::sphere2();
  watch.lap();
  double rmin = 1e300, rmax = 0;
  std::vector<double> rhos, ratios;
  rhos.reserve(size_t(n));
  ratios.reserve(size_t(n));
  for (int i = 0; i < n; ++i) {
    const Vec x = S.sample_point(s + 211, std::uint64_t(i));
    const Vec y = S.sample_point(s + 223, std::uint64_t(i));
    const double chord = (x - y).norm();
    if (chord < 1e-8) continue;
    const double ratio = S.distance(x, y) / chord;
    rmin = std::min(rmin, ratio);
    rmax = std::max(rmax, ratio);
    rhos.push_back(S.distance(x, y));
    ratios.push_back(ratio);
  }
  const double chord_seconds = watch.lap();
  rep.metrics["min_chord_ratio"] = rmin;
  rep.metrics["max_chord_ratio"] = rmax;
  rep.metrics["chord_seconds"] = chord_seconds;
  add_row(rep, "chord-ratio",
          rmin >= 1.0 - 1e-12 && rmax <= M_PI / 2 + 1e-9,
          "rho/chord in [" + fmt(rmin) + ", " + fmt(rmax) +
              "] (band [1, pi/2 + 1e-9])");
  add_row(rep, "chord-runtime", chord_seconds < 1.0,
          fmt(chord_seconds) + " s (budget 1 s)");

  std::vector<size_t> order(rhos.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return rhos[a] < rhos[b]; });
  PlotSeries ps;
  ps.label = "rho/chord vs rho";
  for (size_t i : order) {
    ps.x.push_back(rhos[i]);
    ps.y.push_back(ratios[i]);
  }
  art.plot_title = "arc/chord ratio on the sphere";
  art.series.push_back(std::move(ps));
}

// ---------------------------------------------------------------------------
// hessian-certify: transport-comparison bound, matrix structure scaling,
// geodesic-deviation ratio band, and the finite-difference quadform oracle.
// ---------------------------------------------------------------------------
void run_hessian_certify(const ExperimentSpec& spec, RunReport& rep,
                         Artifacts& art) {
  const Manifold M = spec.problem.empty() ? Manifold::sphere2()
                                          : Manifold::by_name(spec.problem);
  const int n_pairs = int(spec.param("n_pairs", 1000));
  const int n_vec = int(spec.param("n_vectors", 8));
  const int n_fd = std::min(int(spec.param("n_fd", 100)), n_pairs);
  const double rho_lo = spec.param("rho_min", 0.05);
  const double rho_hi = spec.param("rho_max", M.safe_radius());
  const std::uint64_t s = spec.seed;
  Stopwatch watch;

  art.header = {"rho", "transport_deviation", "structure_max_entry_over_rho2",
                "min_j1_ratio", "max_j1_ratio"};
  double worst_dev = 0, min_j1 = 1e300, max_j1 = 0;
  std::vector<double> rhos, entries;
  std::vector<std::pair<Vec, Vec>> fd_pairs;
  for (int i = 0; i < n_pairs; ++i) {
    const Vec x = M.sample_point(s + 11, std::uint64_t(i));
    Vec dir = M.sample_tangent(x, s + 13, std::uint64_t(i));
    if (dir.norm() < 1e-12) continue;
    dir /= dir.norm();
    const double u = rng::uniform(s + 17, std::uint64_t(i), 0, 0);
    const double rho =
        std::exp(std::log(rho_lo) + u * (std::log(rho_hi) - std::log(rho_lo)));
    const Vec y = M.exp(x, rho * dir);
    const CertifyReport cr =
        certify_estimates(M, x, y, n_vec, s + 7919 * std::uint64_t(i));
    worst_dev = std::max(worst_dev, cr.max_transport_deviation);
    min_j1 = std::min(min_j1, cr.min_j1_ratio);
    max_j1 = std::max(max_j1, cr.max_j1_ratio);
    rhos.push_back(rho);
    entries.push_back(cr.max_entry_A2_minus_4A);
    art.rows.push_back({rho, cr.max_transport_deviation,
                        cr.max_entry_A2_minus_4A_over_rho2, cr.min_j1_ratio,
                        cr.max_j1_ratio});
    if (int(fd_pairs.size()) < n_fd) fd_pairs.emplace_back(x, y);
  }

  const LineFit lf = fit_loglog(rhos, entries);

  // quadform against a 4th-order central second difference of rho^2 along
  // geodesic perturbation curves
  double worst_fd = 0;
  const double h = 1e-2;
  for (size_t i = 0; i < fd_pairs.size(); ++i) {
    const Vec& x = fd_pairs[i].first;
    const Vec& y = fd_pairs[i].second;
    const Vec v = M.sample_tangent(x, s + 23, std::uint64_t(i));
    const Vec w = M.sample_tangent(y, s + 29, std::uint64_t(i));
    auto rho2 = [&](double a) {
      const double d = M.distance(M.exp(x, a * v), M.exp(y, a * w));
      return d * d;
    };
    const double A = distance_hessian_quadform(M, x, y, v, w);
    const double fd = (-rho2(2 * h) + 16 * rho2(h) - 30 * rho2(0) +
                       16 * rho2(-h) - rho2(-2 * h)) /
                      (12 * h * h);
    worst_fd = std::max(worst_fd, std::abs(A - fd) / std::max(std::abs(fd), 1e-8));
  }
  const double seconds = watch.lap();

  const double c2 = 6.0 * M.curvature_bound();
  rep.metrics["worst_transport_deviation"] = worst_dev;
  rep.metrics["structure_slope"] = lf.slope;
  rep.metrics["min_j1_ratio"] = min_j1;
  rep.metrics["max_j1_ratio"] = max_j1;
  rep.metrics["worst_fd_relative_error"] = worst_fd;
  rep.metrics["seconds"] = seconds;
  add_row(rep, "transport-comparison-bound", worst_dev <= c2,
          "worst |A - 2||w-Lv||^2| / ((||v||+||w||)^2 rho^2) = " +
              fmt(worst_dev) + " (bound " + fmt(c2) + ")");
  add_row(rep, "matrix-structure-slope",
          lf.slope >= 1.8 && lf.slope <= 2.2,
          "log-log slope of max|A^2-4A| vs rho = " + fmt(lf.slope) +
              " (band 2 +- 0.2)");
  add_row(rep, "j1-ratio-band", min_j1 >= 0.5 && max_j1 <= 1.5,
          "J1 ratios in [" + fmt(min_j1) + ", " + fmt(max_j1) +
              "] (band [0.5, 1.5])");
  add_row(rep, "quadform-fd-match", worst_fd <= 1e-4,
          "worst relative error vs central differences = " + fmt(worst_fd) +
              " (bound 1e-4)");
  add_row(rep, "runtime", seconds < 60.0, fmt(seconds) + " s (budget 60 s)");

  std::vector<size_t> order(rhos.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return rhos[a] < rhos[b]; });
  PlotSeries ps;
  ps.label = "max|A^2-4A| vs rho";
  for (size_t i : order) {
    ps.x.push_back(rhos[i]);
    ps.y.push_back(std::max(entries[i], 1e-300));
  }
  art.plot_title = "distance-Hessian structure scaling";
  art.series.push_back(std::move(ps));
  art.log_x = art.log_y = true;
}

// ---------------------------------------------------------------------------
// sde-convergence: on-manifold residuals, coupled two-point stability under
// common noise, and the short-time mean-square displacement scaling.
// ---------------------------------------------------------------------------
void run_sde_convergence(const ExperimentSpec& spec, RunReport& rep,
                         Artifacts& art) {
  const Problem prob = problem_or(spec, "sphere2-bm");
  const ControlledDynamics& dyn = prob.dyn;
  const Manifold& M = dyn.model;
  const double dt = spec.param("dt", 1e-3);
  const int n_paths = int(spec.param("n_paths", 1e4));
  const std::uint64_t s = spec.seed;
  const ControlSignal u0 = ControlSignal::constant(prob.controls.points.front());
  const CtrlVec u0pt = prob.controls.points.front();
  Stopwatch watch;

  // (a) residual of the returned (projected) states
  const int n_check = int(spec.param("n_check", 100));
  IntegratorConfig cfg;
  cfg.dt = dt;
  cfg.seed = s + 401;
  double on_manifold = 0;
  for (int p = 0; p < n_check; ++p) {
    const SamplePath path = simulate_path(dyn, cfg, prob.t0, prob.x0, u0,
                                          std::uint64_t(p));
    for (const Vec& state : path.states)
      on_manifold = std::max(on_manifold, M.dist2_to_manifold(state));
  }

  // (b) E sup rho^2 of two trajectories driven by the same increments,
  // against the squared initial separation, across a decade and a half
  const double t_window = spec.param("t_window", 0.2);
  const double sep0 = spec.param("sep0", 0.2);
  const int n_sep = 5;
  Vec e0 = M.sample_tangent(prob.x0, s + 31, 0);
  e0 /= e0.norm();
  IntegratorConfig cfg_b;
  cfg_b.dt = dt;
  cfg_b.seed = s + 433;
  const PathIntegrator engine(dyn, cfg_b);
  const int Kb = num_steps(0.0, t_window, dt);
  std::vector<double> sep2s, e_sup;
  for (int j = 0; j < n_sep; ++j) {
    const double d = sep0 * std::pow(0.5, j);
    const Vec x2_init = M.exp(prob.x0, d * e0);
    std::vector<double> sups(size_t(n_paths), 0.0);
    parallel_for(size_t(n_paths), [&](size_t p) {
      Vec x1 = prob.x0, x2 = x2_init;
      double sup = M.distance(x1, x2);
      double t = 0.0;
      for (int k = 0; k < Kb; ++k) {
        const double h = std::min(dt, t_window - t);
        engine.step(t, h, p, std::uint64_t(k), x1, u0pt);
        engine.step(t, h, p, std::uint64_t(k), x2, u0pt);
        sup = std::max(sup, M.distance(x1, x2));
        t += h;
      }
      sups[p] = sup * sup;
    });
    double mean = 0;
    for (double v : sups) mean += v;
    mean /= double(n_paths);
    sep2s.push_back(d * d);
    e_sup.push_back(mean);
    art.rows.push_back({0.0, d * d, mean});
  }
  const LineFit coupled = fit_loglog(sep2s, e_sup);

  // (c) E sup_{r<=t1} rho^2(X(r), x0) against the window length t1
  const double t_short = spec.param("t_short", 0.1);
  const std::vector<int> check_steps = {6, 12, 25, 50, 100};
  const int Kc = check_steps.back();
  const double dt_c = t_short / Kc;
  IntegratorConfig cfg_c;
  cfg_c.dt = dt_c;
  cfg_c.seed = s + 457;
  const PathIntegrator engine_c(dyn, cfg_c);
  std::vector<double> sup_at(size_t(n_paths) * check_steps.size(), 0.0);
  parallel_for(size_t(n_paths), [&](size_t p) {
    Vec x = prob.x0;
    double sup = 0.0;
    size_t ci = 0;
    for (int k = 0; k < Kc; ++k) {
      engine_c.step(k * dt_c, dt_c, p, std::uint64_t(k), x, u0pt);
      const double d = M.distance(x, prob.x0);
      sup = std::max(sup, d * d);
      if (ci < check_steps.size() && k + 1 == check_steps[ci]) {
        sup_at[p * check_steps.size() + ci] = sup;
        ++ci;
      }
    }
  });
  std::vector<double> t1s, e_short;
  for (size_t ci = 0; ci < check_steps.size(); ++ci) {
    double mean = 0;
    for (int p = 0; p < n_paths; ++p)
      mean += sup_at[size_t(p) * check_steps.size() + ci];
    mean /= double(n_paths);
    t1s.push_back(check_steps[ci] * dt_c);
    e_short.push_back(mean);
    art.rows.push_back({1.0, check_steps[ci] * dt_c, mean});
  }
  const LineFit shortt = fit_loglog(t1s, e_short);
  const double seconds = watch.lap();

  art.header = {"part", "x", "mean_sup_rho2"};
  rep.metrics["on_manifold_residual"] = on_manifold;
  rep.metrics["coupled_slope"] = coupled.slope;
  rep.metrics["short_time_slope"] = shortt.slope;
  rep.metrics["seconds"] = seconds;
  add_row(rep, "on-manifold-residual", on_manifold <= 1e-12,
          "max dist^2 of projected states = " + fmt(on_manifold) +
              " (bound 1e-12)");
  add_row(rep, "coupled-stability-slope",
          coupled.slope >= 0.5 && coupled.slope <= 2.0,
          "E sup rho^2 vs rho^2(x1,x2) log-log slope = " + fmt(coupled.slope) +
              " (band [0.5, 2])");
  add_row(rep, "short-time-slope",
          shortt.slope >= 0.7 && shortt.slope <= 1.3,
          "E sup rho^2 vs t1 log-log slope = " + fmt(shortt.slope) +
              " (band 1 +- 0.3)");
  add_row(rep, "runtime", seconds < 120.0,
          fmt(seconds) + " s (budget 120 s)");

  PlotSeries pb, pc;
  pb.label = "coupled: E sup rho^2 vs initial rho^2";
  pb.x = sep2s;
  pb.y = e_sup;
  pc.label = "short-time: E sup rho^2 vs t1";
  pc.x = t1s;
  pc.y = e_short;
  art.plot_title = "path stability scalings";
  art.series = {pb, pc};
  art.log_x = art.log_y = true;
}

// ---------------------------------------------------------------------------
// bm-decay: terminal height of Brownian motion on the sphere against the
// first-eigenfunction decay e^{-t}.
// ---------------------------------------------------------------------------
void run_bm_decay(const ExperimentSpec& spec, RunReport& rep, Artifacts& art) {
  if (!spec.problem.empty() && spec.problem != "sphere2-bm")
    throw ConfigError("bm-decay is defined for sphere2-bm");
  const Problem prob = make_problem("sphere2-bm");
  const ControlledDynamics& dyn = prob.dyn;
  const int n_paths = int(spec.param("n_paths", 1e5));
  const double dt = spec.param("dt", 1e-3);
  Stopwatch watch;

  IntegratorConfig cfg;
  cfg.dt = dt;
  cfg.seed = spec.seed + 601;
  const ControlSignal u0 =
      ControlSignal::constant(prob.controls.points.front());
  const ValueEstimate est =
      estimate_J(dyn, prob.t0, prob.x0, u0, n_paths, cfg);
  const double oracle = prob.x0[2] * std::exp(-dyn.horizon);
  const double err = std::abs(est.mean - oracle);
  const double seconds = watch.lap();

  // decay curve artifact from a smaller ensemble
  const int n_curve = int(spec.param("n_curve", 2000));
  const int K = num_steps(prob.t0, dyn.horizon, dt);
  std::vector<double> height(size_t(K) + 1, 0.0);
  IntegratorConfig cfg_curve = cfg;
  cfg_curve.seed = spec.seed + 607;
  for (int p = 0; p < n_curve; ++p) {
    const Vec last = integrate_observed(
        dyn, cfg_curve, prob.t0, dyn.horizon, prob.x0, u0, std::uint64_t(p),
        [&](int k, double, double, const Vec& before, const CtrlVec&,
            const Vec&, double) { height[size_t(k)] += before[2]; });
    height[size_t(K)] += last[2];
  }
  art.header = {"t", "mean_height", "first_eigenfunction"};
  PlotSeries pm, pe;
  pm.label = "ensemble mean height";
  pe.label = "e^{-t}";
  for (int k = 0; k <= K; ++k) {
    const double t = std::min(prob.t0 + k * dt, dyn.horizon);
    const double mean = height[size_t(k)] / double(n_curve);
    art.rows.push_back({t, mean, prob.x0[2] * std::exp(-t)});
    pm.x.push_back(t);
    pm.y.push_back(mean);
    pe.x.push_back(t);
    pe.y.push_back(prob.x0[2] * std::exp(-t));
  }
  art.plot_title = "Brownian height decay on the sphere";
  art.series = {pm, pe};

  rep.metrics["mean_height"] = est.mean;
  rep.metrics["std_error"] = est.std_error;
  rep.metrics["oracle"] = oracle;
  rep.metrics["abs_error"] = err;
  rep.metrics["seconds"] = seconds;
  add_row(rep, "spectral-decay", err <= 3.0 * est.std_error,
          "|mean " + fmt(est.mean) + " - e^{-1}| = " + fmt(err) +
              " (bound 3 se = " + fmt(3.0 * est.std_error) + ")");
  add_row(rep, "runtime", seconds < 300.0,
          fmt(seconds) + " s (budget 300 s)");
}

// ---------------------------------------------------------------------------
// dpp-gap: the dynamic-programming self-consistency gap of the solved field,
// at the benchmark resolution and once more under simultaneous refinement.
// ---------------------------------------------------------------------------
void run_dpp_gap(const ExperimentSpec& spec, RunReport& rep, Artifacts& art) {
  std::vector<std::string> ids;
  if (spec.problem.empty()) {
    ids = {"circle-steering", "circle-diffusive"};
  } else {
    ids = {spec.problem};
  }
  const int window = int(spec.param("window_steps", 5));
  Stopwatch watch;
  art.header = {"problem_index", "dt", "gap"};

  for (size_t pi = 0; pi < ids.size(); ++pi) {
    const Problem prob = make_problem(ids[pi]);
    const ControlledDynamics& dyn = prob.dyn;
    const int n_paths =
        dyn.num_diffusion == 0 ? 2 : int(spec.param("n_paths", 1e6));
    const bool circle = dyn.model.ambient_dim() == 2;
    const int res0 = circle ? int(spec.param("nodes", 200))
                            : int(spec.param("level", 3));
    const double dt0 = spec.param("dt", 1e-2);

    // The gap sequence approaches the benchmark resolution from 4x coarser;
    // at the benchmark grid itself the gap sits at the Monte Carlo noise
    // floor, so the decrease is certified on the way in, where it is a
    // systematic (resolvable) quantity. Sphere grids keep the step size:
    // coarsening it 4x would break the foot-spread guard.
    std::vector<double> gaps;
    const int levels = 3;
    for (int r = 0; r < levels; ++r) {
      const int res = circle ? res0 / 4 * (1 << r) : res0 - 2 + r;
      const double dt = circle ? dt0 * double(1 << (levels - 1 - r)) / 2.0
                               : dt0;
      const ManifoldGrid grid = ManifoldGrid::for_model(dyn.model, res);
      const ValueField field = solve_backward(dyn, grid, dt, prob.controls);
      const double s_time =
          std::min(prob.t0 + window * field.dt, dyn.horizon);
      IntegratorConfig cfg;
      cfg.dt = field.dt;
      cfg.seed = spec.seed + 701 + 13 * std::uint64_t(pi);
      gaps.push_back(dpp_gap(dyn, prob.t0, s_time, prob.x0, field,
                             prob.controls, n_paths, cfg));
      art.rows.push_back({double(pi), dt, gaps.back()});
    }
    bool decreasing = true;
    std::string trend;
    for (int r = 0; r < levels; ++r) {
      if (r) decreasing = decreasing && gaps[size_t(r)] < gaps[size_t(r - 1)];
      trend += (r ? " -> " : "") + fmt(gaps[size_t(r)]);
    }
    rep.metrics["gap_" + slug(ids[pi])] = gaps.back();
    rep.metrics["gap_coarse_" + slug(ids[pi])] = gaps.front();
    add_row(rep, "gap-" + ids[pi], gaps.back() <= 5e-2,
            "gap at benchmark grid = " + fmt(gaps.back()) + " (bound 5e-2)");
    add_row(rep, "refinement-" + ids[pi], decreasing,
            "gap " + trend + " under refinement (must decrease)");
  }
  const double seconds = watch.lap();
  rep.metrics["seconds"] = seconds;
  add_row(rep, "runtime", seconds < 120.0,
          fmt(seconds) + " s (budget 120 s)");
}

// ---------------------------------------------------------------------------
// hjb-benchmark: solver vs brute-force enumeration, solver vs the heat
// semigroup on the sphere, and the scheme-structure checks (comparison,
// constant invariance) on every built-in problem.
// ---------------------------------------------------------------------------
void run_hjb_benchmark(const ExperimentSpec& spec, RunReport& rep,
                       Artifacts& art) {
  const std::uint64_t s = spec.seed;
  Stopwatch watch;

  // solver against exhaustive enumeration on the deterministic benchmark
  {
    const Problem prob = make_problem("circle-steering");
    const ManifoldGrid grid =
        ManifoldGrid::circle_ring(int(spec.param("nodes", 200)));
    const double dt = spec.param("dt", 1e-2);
    const ValueField field =
        solve_backward(prob.dyn, grid, dt, prob.controls);
    IntegratorConfig cfg;
    cfg.dt = dt;
    cfg.seed = s + 801;
    const BruteForceResult bf = brute_force_value(
        prob.dyn, prob.t0, prob.x0, int(spec.param("intervals", 2)),
        prob.controls, 2, cfg);
    const double v_solver = field.eval(prob.t0, prob.x0);
    const double diff = std::abs(v_solver - bf.estimate.mean);
    const double sec = watch.lap();
    rep.metrics["brute_force_diff"] = diff;
    rep.metrics["brute_force_value"] = bf.estimate.mean;
    rep.metrics["solver_value"] = v_solver;
    add_row(rep, "value-vs-brute-force", diff <= 2e-2,
            "|solver " + fmt(v_solver) + " - enumeration " +
                fmt(bf.estimate.mean) + "| = " + fmt(diff) + " (bound 2e-2)");
    add_row(rep, "brute-runtime", sec < 60.0,
            fmt(sec) + " s (budget 60 s)");
  }

  // solver against the first-eigenfunction heat solution on the sphere
  {
    const Problem prob = make_problem("sphere2-bm");
    const ManifoldGrid grid =
        ManifoldGrid::sphere_icosahedral(int(spec.param("level", 4)));
    const double dt = spec.param("dt", 1e-2);
    const ValueField field =
        solve_backward(prob.dyn, grid, dt, prob.controls);
    const double T = prob.dyn.horizon;
    double sup = 0, sup_t0 = 0;
    art.header = {"t", "sup_error"};
    PlotSeries ps;
    ps.label = "sup_x |V - x3 e^{-(T-t)}|";
    for (int k = 0; k < field.num_slices(); ++k) {
      const double decay = std::exp(-(T - field.times[size_t(k)]));
      double slice_sup = 0;
      for (int i = 0; i < grid.num_nodes(); ++i) {
        const double exact = grid.node(i)[2] * decay;
        slice_sup =
            std::max(slice_sup, std::abs(field.values[size_t(k)][i] - exact));
      }
      sup = std::max(sup, slice_sup);
      if (k == 0) sup_t0 = slice_sup;
      art.rows.push_back({field.times[size_t(k)], slice_sup});
      ps.x.push_back(field.times[size_t(k)]);
      ps.y.push_back(slice_sup);
    }
    const double sec = watch.lap();
    rep.metrics["semigroup_sup_error"] = sup;
    rep.metrics["semigroup_sup_error_t0"] = sup_t0;
    add_row(rep, "heat-semigroup-sup", sup <= 2e-2,
            "sup |V - x3 e^{-(T-t)}| = " + fmt(sup) + " (bound 2e-2)");
    add_row(rep, "semigroup-runtime", sec < 300.0,
            fmt(sec) + " s (budget 300 s)");
    art.plot_title = "semigroup benchmark error per slice";
    art.series.push_back(std::move(ps));
  }

  // scheme structure: discrete comparison is exact; adding a constant to the
  // terminal cost shifts the whole field by that constant to roundoff
  {
    struct Case {
      const char* id;
      int resolution;
      double dt;
    };
    // step sizes honor the foot-spread guard of each problem
    const Case cases[] = {{"circle-steering", 200, 1e-2},
                          {"circle-diffusive", 200, 1e-2},
                          {"sphere2-bm", 3, 1e-2},
                          {"sphere2-controlled", 3, 2e-3}};
    const double c_shift = 0.8;
    for (const Case& c : cases) {
      const Problem prob = make_problem(c.id);
      const ManifoldGrid grid =
          ManifoldGrid::for_model(prob.dyn.model, c.resolution);
      const ValueField v1 =
          solve_backward(prob.dyn, grid, c.dt, prob.controls);

      ControlledDynamics bumped = prob.dyn;
      const TerminalFn h = prob.dyn.terminal_cost;
      bumped.terminal_cost = [h](const Vec& x) {
        return h(x) + 0.25 * (1.0 + x[0]);  // nonnegative on these models
      };
      const ValueField v2 = solve_backward(bumped, grid, c.dt, prob.controls);

      ControlledDynamics shifted = prob.dyn;
      shifted.terminal_cost = [h, c_shift](const Vec& x) {
        return h(x) + c_shift;
      };
      const ValueField v3 = solve_backward(shifted, grid, c.dt, prob.controls);

      double violation = 0, inv_dev = 0;
      for (int k = 0; k < v1.num_slices(); ++k)
        for (int i = 0; i < grid.num_nodes(); ++i) {
          violation = std::max(
              violation, v1.values[size_t(k)][i] - v2.values[size_t(k)][i]);
          inv_dev = std::max(
              inv_dev, std::abs(v3.values[size_t(k)][i] -
                                v1.values[size_t(k)][i] - c_shift));
        }
      violation = std::max(violation, 0.0);
      rep.metrics["comparison_violation_" + slug(c.id)] = violation;
      rep.metrics["invariance_deviation_" + slug(c.id)] = inv_dev;
      add_row(rep, std::string("comparison-") + c.id, violation == 0.0,
              "max(V[h] - V[h + bump]) = " + fmt(violation) +
                  " (must be <= 0 exactly)");
      add_row(rep, std::string("invariance-") + c.id, inv_dev <= 1e-12,
              "max |V[h+c] - V[h] - c| = " + fmt(inv_dev) + " (bound 1e-12)");
    }
    const double sec = watch.lap();
    rep.metrics["structure_seconds"] = sec;
    add_row(rep, "structure-runtime", sec < 60.0,
            fmt(sec) + " s (budget 60 s)");
  }
}

// ---------------------------------------------------------------------------
// feedback-gap: cost of the synthesized feedback policy against the field
// value at the start point.
// ---------------------------------------------------------------------------
void run_feedback_gap(const ExperimentSpec& spec, RunReport& rep,
                      Artifacts& art) {
  std::vector<std::string> ids;
  if (spec.problem.empty()) {
    ids = {"circle-steering", "sphere2-bm"};
  } else {
    ids = {spec.problem};
  }
  Stopwatch watch;
  art.header = {"problem_index", "field_value", "policy_cost", "std_error",
                "gap"};

  for (size_t pi = 0; pi < ids.size(); ++pi) {
    const Problem prob = make_problem(ids[pi]);
    const ControlledDynamics& dyn = prob.dyn;
    const bool circle = dyn.model.ambient_dim() == 2;
    // the field must be resolved well enough that its own bias sits below
    // the rollout's discretization error, otherwise the lower bracket is
    // meaningless on noise-free problems
    const int res = circle ? int(spec.param("nodes", 1600))
                           : int(spec.param("level", 4));
    const double dt = spec.param("dt", 1e-2);
    const ManifoldGrid grid = ManifoldGrid::for_model(dyn.model, res);
    const ValueField field = solve_backward(dyn, grid, dt, prob.controls);

    IntegratorConfig cfg;
    cfg.dt = circle ? spec.param("rollout_dt_circle", 2e-2)
                    : spec.param("rollout_dt", 1e-3);
    cfg.seed = spec.seed + 901 + 17 * std::uint64_t(pi);
    const int n_paths =
        dyn.num_diffusion == 0 ? 2 : int(spec.param("n_paths", 1e4));
    const ClosedLoopGap g = closed_loop_gap(dyn, field, prob.t0, prob.x0,
                                            prob.controls, n_paths, cfg);
    art.rows.push_back({double(pi), g.field_value, g.estimate.mean,
                        g.std_error, g.gap});
    rep.metrics["gap_" + slug(ids[pi])] = g.gap;
    rep.metrics["std_error_" + slug(ids[pi])] = g.std_error;
    add_row(rep, "gap-" + ids[pi],
            g.gap >= -3.0 * g.std_error && g.gap <= 5e-2,
            "policy cost - field value = " + fmt(g.gap) + " (band [-3 se = " +
                fmt(-3.0 * g.std_error) + ", 5e-2])");
  }
  const double seconds = watch.lap();
  rep.metrics["seconds"] = seconds;
  add_row(rep, "runtime", seconds < 180.0,
          fmt(seconds) + " s (budget 180 s)");
}

// ---------------------------------------------------------------------------
// regularity: spatial Lipschitz constant stability across refinements and
// the time-increment scaling exponent of the solved field.
// ---------------------------------------------------------------------------
void run_regularity(const ExperimentSpec& spec, RunReport& rep,
                    Artifacts& art) {
  const Problem prob = problem_or(spec, "circle-diffusive");
  const ControlledDynamics& dyn = prob.dyn;
  const Manifold& M = dyn.model;
  const bool circle = M.ambient_dim() == 2;
  const int res0 = circle ? int(spec.param("nodes", 200))
                          : int(spec.param("level", 2));
  const double dt0 = spec.param("dt", 1e-2);
  Stopwatch watch;
  art.header = {"refinement", "lipschitz"};

  std::vector<double> lips;
  ValueField finest = ValueField(ManifoldGrid::for_model(M, res0));
  for (int r = 0; r < 3; ++r) {
    const int res = circle ? res0 * (1 << r) : res0 + r;
    const double dt = dt0 / (1 << r);
    const ManifoldGrid grid = ManifoldGrid::for_model(M, res);
    const ValueField field = solve_backward(dyn, grid, dt, prob.controls);
    double lip = 0;
    for (int k = 0; k < field.num_slices(); ++k)
      for (int i = 0; i < grid.num_nodes(); ++i)
        for (int j : grid.neighbors(i)) {
          if (j < i) continue;
          const double rho = M.distance(grid.node(i), grid.node(j));
          lip = std::max(lip, std::abs(field.values[size_t(k)][i] -
                                       field.values[size_t(k)][j]) /
                                  rho);
        }
    lips.push_back(lip);
    art.rows.push_back({double(r), lip});
    if (r == 2) finest = field;
  }
  const double lip_min = *std::min_element(lips.begin(), lips.end());
  const double lip_max = *std::max_element(lips.begin(), lips.end());
  const double spread = lip_max / std::max(lip_min, 1e-300) - 1.0;

  // time increments from the initial slice of the finest solve
  std::vector<double> deltas, sups;
  PlotSeries ps;
  ps.label = "sup_x |V(t0+d) - V(t0)| vs d";
  for (int step : {4, 8, 16, 32, 64}) {
    if (step >= finest.num_slices()) break;
    double sup = 0;
    for (int i = 0; i < finest.grid.num_nodes(); ++i)
      sup = std::max(sup, std::abs(finest.values[size_t(step)][i] -
                                   finest.values[0][i]));
    deltas.push_back(finest.times[size_t(step)] - finest.times[0]);
    sups.push_back(sup);
    ps.x.push_back(deltas.back());
    ps.y.push_back(sup);
  }
  const LineFit hold = fit_loglog(deltas, sups);
  const double seconds = watch.lap();

  rep.metrics["lipschitz_min"] = lip_min;
  rep.metrics["lipschitz_max"] = lip_max;
  rep.metrics["lipschitz_spread"] = spread;
  rep.metrics["holder_slope"] = hold.slope;
  rep.metrics["seconds"] = seconds;
  add_row(rep, "lipschitz-stability", spread <= 0.2,
          "Lipschitz constants in [" + fmt(lip_min) + ", " + fmt(lip_max) +
              "], spread " + fmt(spread) + " (bound 0.2)");
  add_row(rep, "holder-slope", hold.slope >= 0.45,
          "time-increment log-log slope = " + fmt(hold.slope) +
              " (bound >= 0.45)");
  add_row(rep, "runtime", seconds < 300.0,
          fmt(seconds) + " s (budget 300 s)");
  art.plot_title = "time-increment scaling of the value field";
  art.series.push_back(std::move(ps));
  art.log_x = art.log_y = true;
}

// ---------------------------------------------------------------------------
// continuous-dependence: response of the value field to scaling the
// diffusion, against the coefficient-distance envelope.
// ---------------------------------------------------------------------------
void run_continuous_dependence(const ExperimentSpec& spec, RunReport& rep,
                               Artifacts& art) {
  const Problem prob = problem_or(spec, "circle-diffusive");
  const ControlledDynamics& base = prob.dyn;
  const Manifold& M = base.model;
  const bool circle = M.ambient_dim() == 2;
  const int res0 = circle ? int(spec.param("nodes", 200))
                          : int(spec.param("level", 2));
  const double dt0 = spec.param("dt", 1e-2);
  const std::vector<double> deltas = {0.02, 0.04, 0.06, 0.08, 0.1};
  const ExtensionConfig ext = ExtensionConfig::for_model(M);
  const CtrlVec u0 = prob.controls.points.front();
  Stopwatch watch;
  art.header = {"refinement", "delta", "sup_value_diff", "envelope"};

  auto scaled_dynamics = [&](double delta) {
    ControlledDynamics d = base;
    const double c = 1.0 + delta;
    for (size_t i = 0; i < d.diffusion.size(); ++i) {
      const TimeField sig = base.diffusion[i];
      d.diffusion[i] = [sig, c](double t, const Vec& x, const CtrlVec& u) {
        return Vec(c * sig(t, x, u));
      };
    }
    for (size_t i = 0; i < d.diffusion_deriv.size(); ++i) {
      const TimeFieldDeriv dv = base.diffusion_deriv[i];
      d.diffusion_deriv[i] = [dv, c](double t, const Vec& x, const CtrlVec& u,
                                     const Vec& v) {
        return Vec(c * dv(t, x, u, v));
      };
    }
    d.field_bound = base.field_bound * c;
    d.field_lipschitz = base.field_lipschitz * c;
    return d;
  };

  double consts[2] = {0, 0};
  double worst_r2 = 1.0;
  std::vector<PlotSeries> series;
  for (int r = 0; r < 2; ++r) {
    const int res = circle ? res0 * (r + 1) : res0 + r;
    const double dt = dt0 / (r + 1);
    const ManifoldGrid grid = ManifoldGrid::for_model(M, res);
    const ValueField v_base = solve_backward(base, grid, dt, prob.controls);
    const double span = std::sqrt(base.horizon - prob.t0);

    std::vector<double> diffs, envs;
    PlotSeries ps;
    ps.label = "refinement " + fmt(double(r));
    for (double delta : deltas) {
      const ControlledDynamics scaled = scaled_dynamics(delta);
      const ValueField v_scaled =
          solve_backward(scaled, grid, dt, prob.controls);
      double diff = 0;
      for (int i = 0; i < grid.num_nodes(); ++i)
        diff = std::max(diff,
                        std::abs(v_base.values[0][i] - v_scaled.values[0][i]));

      // coefficient distance over the nodes: field gap plus the gap of the
      // covariant correction terms
      double sup_sigma = 0, sup_corr = 0;
      for (int i = 0; i < grid.num_nodes(); ++i) {
        const Vec& x = grid.node(i);
        const DynamicsValues a = eval_dynamics(base, prob.t0, x, u0);
        const DynamicsValues b = eval_dynamics(scaled, prob.t0, x, u0);
        double gap = 0;
        for (size_t m = 0; m < a.diffusion.size(); ++m)
          gap += (a.diffusion[m] - b.diffusion[m]).norm();
        sup_sigma = std::max(sup_sigma, gap);
        const Vec ca = diffusion_correction(base, ext, prob.t0, x, u0);
        const Vec cb = diffusion_correction(scaled, ext, prob.t0, x, u0);
        sup_corr = std::max(sup_corr, (ca - cb).norm());
      }
      const double env = span * (sup_sigma + sup_corr);
      diffs.push_back(diff);
      envs.push_back(env);
      art.rows.push_back({double(r), delta, diff, env});
      ps.x.push_back(delta);
      ps.y.push_back(diff);
    }
    series.push_back(std::move(ps));

    const LineFit lf = fit_line(deltas, diffs);
    worst_r2 = std::min(worst_r2, lf.r2);
    double c_env = 0;
    for (size_t i = 0; i < diffs.size(); ++i)
      c_env = std::max(c_env, diffs[i] / std::max(envs[i], 1e-300));
    consts[r] = c_env;
    rep.metrics[r == 0 ? "linear_r2" : "linear_r2_refined"] = lf.r2;
    rep.metrics[r == 0 ? "envelope_constant" : "envelope_constant_refined"] =
        c_env;
  }
  const double stability =
      std::abs(consts[1] - consts[0]) / std::max(consts[0], 1e-300);
  const double seconds = watch.lap();

  rep.metrics["envelope_stability"] = stability;
  rep.metrics["seconds"] = seconds;
  add_row(rep, "linear-response-r2", worst_r2 >= 0.95,
          "R^2 of sup|V1 - V2| vs delta = " + fmt(worst_r2) +
              " (bound >= 0.95)");
  add_row(rep, "envelope-constant-stability", stability <= 0.3,
          "envelope constant " + fmt(consts[0]) + " -> " + fmt(consts[1]) +
              ", relative change " + fmt(stability) + " (bound 0.3)");
  add_row(rep, "runtime", seconds < 600.0,
          fmt(seconds) + " s (budget 600 s)");
  art.plot_title = "value response to diffusion scaling";
  art.series = std::move(series);
}

using Runner = void (*)(const ExperimentSpec&, RunReport&, Artifacts&);

const std::vector<std::pair<std::string, Runner>>& runners() {
  static const std::vector<std::pair<std::string, Runner>> table = {
      {"geometry-certify", run_geometry_certify},
      {"hessian-certify", run_hessian_certify},
      {"sde-convergence", run_sde_convergence},
      {"bm-decay", run_bm_decay},
      {"dpp-gap", run_dpp_gap},
      {"hjb-benchmark", run_hjb_benchmark},
      {"feedback-gap", run_feedback_gap},
      {"regularity", run_regularity},
      {"continuous-dependence", run_continuous_dependence},
  };
  return table;
}

void flush_artifacts(const RunReport& rep, const Artifacts& art) {
  const ExperimentSpec& spec = rep.spec;
  std::filesystem::create_directories(spec.out_dir);
  const std::string base = spec.out_dir + "/" + spec.name;
  if (!art.rows.empty()) write_csv(base + ".csv", art.header, art.rows);

  std::vector<std::pair<std::string, std::string>> fields;
  fields.emplace_back("experiment", spec.name);
  fields.emplace_back("problem",
                      spec.problem.empty() ? "default" : spec.problem);
  fields.emplace_back("seed", std::to_string(spec.seed));
  fields.emplace_back("version", rep.version);
  fields.emplace_back("wall_seconds", fmt(rep.wall_seconds));
  for (const auto& [k, v] : rep.metrics)
    fields.emplace_back("metric." + k, fmt(v));
  for (const auto& row : rep.criteria)
    fields.emplace_back("pass." + row.id, row.pass ? "1" : "0");
  write_record(base + "-summary.txt", fields);

  if (spec.svg && !art.series.empty())
    write_svg_plot(base + ".svg", art.plot_title, art.series, art.log_x,
                   art.log_y);
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

double ExperimentSpec::param(const std::string& key, double fallback) const {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

bool RunReport::all_pass() const {
  for (const auto& row : criteria)
    if (!row.pass) return false;
  return true;
}

const CriterionRow* RunReport::find(const std::string& id) const {
  for (const auto& row : criteria)
    if (row.id == id) return &row;
  return nullptr;
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, fn] : runners()) out.push_back(name);
    return out;
  }();
  return names;
}

RunReport run_experiment(const ExperimentSpec& spec) {
  const Runner* runner = nullptr;
  for (const auto& [name, fn] : runners())
    if (name == spec.name) runner = &fn;
  if (!runner) throw ConfigError("unknown experiment: " + spec.name);

  RunReport rep;
  rep.spec = spec;
  rep.seed = spec.seed;
  rep.version = kVersion;
  Artifacts art;
  Stopwatch watch;
  (*runner)(spec, rep, art);
  rep.wall_seconds = watch.lap();
  if (!spec.out_dir.empty()) flush_artifacts(rep, art);
  return rep;
}

std::vector<ExperimentSpec> parse_spec_text(const std::string& text) {
  std::vector<ExperimentSpec> out;
  ExperimentSpec cur;
  bool open = false;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const std::string where = " (line " + std::to_string(lineno) + ")";

    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("unterminated section header" + where);
      if (open) out.push_back(cur);
      cur = ExperimentSpec{};
      cur.name = trim(line.substr(1, line.size() - 2));
      const auto& names = experiment_names();
      if (std::find(names.begin(), names.end(), cur.name) == names.end())
        throw ConfigError("unknown experiment: " + cur.name + where);
      open = true;
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected `key = value`" + where);
    if (!open) throw ConfigError("key outside an experiment section" + where);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("empty key or value" + where);

    if (key == "problem") {
      cur.problem = value;
    } else if (key == "out") {
      cur.out_dir = value;
    } else if (key == "seed") {
      try {
        cur.seed = std::stoull(value);
      } catch (const std::exception&) {
        throw ConfigError("seed must be a nonnegative integer" + where);
      }
    } else if (key == "svg") {
      if (value == "1" || value == "true")
        cur.svg = true;
      else if (value == "0" || value == "false")
        cur.svg = false;
      else
        throw ConfigError("svg must be 0/1/true/false" + where);
    } else {
      char* end = nullptr;
      const double v = std::strtod(value.c_str(), &end);
      if (end == value.c_str() || *end != '\0')
        throw ConfigError("numeric value expected for `" + key + "`" + where);
      cur.params[key] = v;
    }
  }
  if (open) out.push_back(cur);
  if (out.empty()) throw ConfigError("no experiment sections found");
  return out;
}

std::vector<ExperimentSpec> parse_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_spec_text(buf.str());
}

std::vector<ExperimentSpec> certification_suite(std::uint64_t seed) {
  std::vector<ExperimentSpec> specs;
  std::uint64_t k = 0;
  for (const std::string& name : experiment_names()) {
    ExperimentSpec spec;
    spec.name = name;
    spec.seed = seed + 1000 * k++;
    specs.push_back(std::move(spec));
  }
  return specs;
}

std::vector<AcceptanceLine> acceptance_summary(
    const std::vector<RunReport>& reports) {
  struct LineSpec {
    int number;
    const char* label;
    const char* experiment;
    std::vector<std::string> rows;
  };
  const std::vector<LineSpec> lines = {
      {1,
       "geometry roundtrips",
       "geometry-certify",
       {"exp-log-roundtrip", "geodesic-distance", "transport-isometry",
        "log-reversal", "roundtrip-runtime"}},
      {2, "distance equivalence", "geometry-certify",
       {"chord-ratio", "chord-runtime"}},
      {3,
       "distance-squared Hessian certification",
       "hessian-certify",
       {"transport-comparison-bound", "matrix-structure-slope",
        "j1-ratio-band", "quadform-fd-match", "runtime"}},
      {4,
       "SDE on-manifold and coupling proxies",
       "sde-convergence",
       {"on-manifold-residual", "coupled-stability-slope", "short-time-slope",
        "runtime"}},
      {5, "Brownian spectral decay", "bm-decay", {"spectral-decay", "runtime"}},
      {6, "solver vs brute-force enumeration", "hjb-benchmark",
       {"value-vs-brute-force", "brute-runtime"}},
      {7, "solver vs heat semigroup", "hjb-benchmark",
       {"heat-semigroup-sup", "semigroup-runtime"}},
      {8,
       "dynamic-programming gap",
       "dpp-gap",
       {"gap-circle-steering", "gap-circle-diffusive",
        "refinement-circle-steering", "refinement-circle-diffusive",
        "runtime"}},
      {9, "closed-loop feedback gap", "feedback-gap",
       {"gap-circle-steering", "gap-sphere2-bm", "runtime"}},
      {10, "value regularity", "regularity",
       {"lipschitz-stability", "holder-slope", "runtime"}},
      {11,
       "continuous dependence on diffusion",
       "continuous-dependence",
       {"linear-response-r2", "envelope-constant-stability", "runtime"}},
      {12,
       "scheme comparison and invariance",
       "hjb-benchmark",
       {"comparison-circle-steering", "invariance-circle-steering",
        "comparison-circle-diffusive", "invariance-circle-diffusive",
        "comparison-sphere2-bm", "invariance-sphere2-bm",
        "comparison-sphere2-controlled", "invariance-sphere2-controlled",
        "structure-runtime"}},
  };

  std::vector<AcceptanceLine> out;
  for (const LineSpec& ls : lines) {
    AcceptanceLine line;
    line.number = ls.number;
    line.label = ls.label;
    const RunReport* rep = nullptr;
    for (const RunReport& r : reports)
      if (r.spec.name == ls.experiment) rep = &r;
    if (!rep) {
      line.pass = false;
      line.detail = "experiment `" + std::string(ls.experiment) + "` not run";
      out.push_back(std::move(line));
      continue;
    }
    bool pass = true;
    std::string detail;
    for (const std::string& id : ls.rows) {
      const CriterionRow* row = rep->find(id);
      if (!row) {
        pass = false;
        detail += (detail.empty() ? "" : "; ") + ("missing row " + id);
        continue;
      }
      pass = pass && row->pass;
      if (!detail.empty()) detail += "; ";
      detail += row->detail;
    }
    line.pass = pass;
    line.detail = detail;
    out.push_back(std::move(line));
  }
  return out;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  for (size_t i = 0; i < header.size(); ++i)
    out << (i ? "," : "") << header[i];
  out << "\n";
  char buf[64];
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw ConfigError("csv row width mismatch in " + path);
    for (size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.12g", row[i]);
      out << (i ? "," : "") << buf;
    }
    out << "\n";
  }
  if (!out) throw ConfigError("write failed: " + path);
}

void write_record(
    const std::string& path,
    const std::vector<std::pair<std::string, std::string>>& fields) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  for (const auto& [k, v] : fields) out << k << " = " << v << "\n";
  if (!out) throw ConfigError("write failed: " + path);
}

void write_svg_plot(const std::string& path, const std::string& title,
                    const std::vector<PlotSeries>& series, bool log_x,
                    bool log_y) {
  const int width = 640, height = 440, margin = 60;
  auto tx = [&](double v) { return log_x ? std::log10(std::max(v, 1e-300)) : v; };
  auto ty = [&](double v) { return log_y ? std::log10(std::max(v, 1e-300)) : v; };

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& ps : series)
    for (size_t i = 0; i < ps.x.size(); ++i) {
      const double x = tx(ps.x[i]), y = ty(ps.y[i]);
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  if (xmin > xmax) {
    xmin = 0;
    xmax = 1;
  }
  if (ymin > ymax) {
    ymin = 0;
    ymax = 1;
  }
  const double xpad = (xmax - xmin) * 0.05 + 1e-12;
  const double ypad = (ymax - ymin) * 0.05 + 1e-12;
  xmin -= xpad;
  xmax += xpad;
  ymin -= ypad;
  ymax += ypad;
  auto px = [&](double v) {
    return margin + (tx(v) - xmin) / (xmax - xmin) * (width - 2 * margin);
  };
  auto py = [&](double v) {
    return height - margin -
           (ty(v) - ymin) / (ymax - ymin) * (height - 2 * margin);
  };

  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                  "#9467bd", "#ff7f0e", "#8c564b"};
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\""
      << width - 2 * margin << "\" height=\"" << height - 2 * margin
      << "\" fill=\"none\" stroke=\"#444\"/>\n"
      << "<text x=\"" << width / 2 << "\" y=\"" << margin - 20
      << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"14\">"
      << title << "</text>\n";
  char buf[64];
  auto label = [&](double v, bool is_log) {
    std::snprintf(buf, sizeof buf, "%.3g", is_log ? std::pow(10.0, v) : v);
    return std::string(buf);
  };
  out << "<text x=\"" << margin << "\" y=\"" << height - margin + 18
      << "\" font-family=\"monospace\" font-size=\"11\">"
      << label(xmin, log_x) << "</text>\n"
      << "<text x=\"" << width - margin << "\" y=\"" << height - margin + 18
      << "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"11\">"
      << label(xmax, log_x) << "</text>\n"
      << "<text x=\"" << margin - 6 << "\" y=\"" << height - margin
      << "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"11\">"
      << label(ymin, log_y) << "</text>\n"
      << "<text x=\"" << margin - 6 << "\" y=\"" << margin + 4
      << "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"11\">"
      << label(ymax, log_y) << "</text>\n";
  for (size_t si = 0; si < series.size(); ++si) {
    const PlotSeries& ps = series[si];
    const char* color = palette[si % 6];
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    for (size_t i = 0; i < ps.x.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(ps.x[i]), py(ps.y[i]));
      out << buf;
    }
    out << "\"/>\n";
    out << "<text x=\"" << width - margin - 8 << "\" y=\""
        << margin + 16 + 14 * int(si)
        << "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"11\" "
           "fill=\""
        << color << "\">" << ps.label << "</text>\n";
  }
  out << "</svg>\n";
  if (!out) throw ConfigError("write failed: " + path);
}

}  // namespace manoc
