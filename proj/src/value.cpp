#include "manoc/value.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace manoc {

namespace {

// Welford accumulator; deterministic when fed in index order.
struct MeanVar {
  double mean = 0.0, m2 = 0.0;
  long n = 0;
  void add(double v) {
    ++n;
    const double d = v - mean;
    mean += d / double(n);
    m2 += d * (v - mean);
  }
  double std_error() const {
    if (n < 2) return 0.0;
    return std::sqrt(std::max(m2, 0.0) / double(n - 1) / double(n));
  }
};

double one_path_cost(const ControlledDynamics& dyn, const IntegratorConfig& cfg,
                     double t0, double t_end, const Vec& x0,
                     const ControlSignal& u, std::uint64_t p) {
  double run = 0.0;
  Vec xT = integrate_observed(dyn, cfg, t0, t_end, x0, u, p,
                              [&](int, double t, double h, const Vec& x,
                                  const CtrlVec& uk, const Vec&, double) {
                                run += h * dyn.running_cost(t, x, uk);
                              });
  return run + dyn.terminal_cost(xT);
}

}  // namespace

double path_cost(const ControlledDynamics& dyn, const SamplePath& path) {
  double run = 0.0;
  for (size_t k = 0; k + 1 < path.times.size(); ++k)
    run += (path.times[k + 1] - path.times[k]) *
           dyn.running_cost(path.times[k], path.states[k], path.controls[k]);
  return run + dyn.terminal_cost(path.states.back());
}

ValueEstimate estimate_J(const ControlledDynamics& dyn, double t0,
                         const Vec& x0, const ControlSignal& u, int n_paths,
                         const IntegratorConfig& cfg) {
  if (n_paths < 2) throw ConfigError("estimate_J needs n_paths >= 2");
  MeanVar acc;
  for (int p = 0; p < n_paths; ++p)
    acc.add(one_path_cost(dyn, cfg, t0, dyn.horizon, x0, u, std::uint64_t(p)));
  return ValueEstimate{acc.mean, acc.std_error(), n_paths};
}

BruteForceResult brute_force_value(const ControlledDynamics& dyn, double t0,
                                   const Vec& x0, int intervals,
                                   const ControlSet& U_h, int n_paths,
                                   const IntegratorConfig& cfg) {
  if (intervals < 1) throw ConfigError("need at least one control interval");
  const int nu = U_h.size();
  if (nu < 1) throw ConfigError("empty control set");
  if (std::pow(double(nu), double(intervals)) > 1e6 + 0.5)
    throw EnumerationTooLarge("|U_h|^K exceeds 1e6 candidates");

  const double T = dyn.horizon;
  std::vector<double> breaks(static_cast<size_t>(intervals) + 1);
  for (int j = 0; j <= intervals; ++j)
    breaks[size_t(j)] = t0 + (T - t0) * double(j) / double(intervals);

  std::vector<int> idx(static_cast<size_t>(intervals), 0), best_idx;
  ValueEstimate best;
  double best_mean = std::numeric_limits<double>::infinity();
  std::vector<CtrlVec> pts(static_cast<size_t>(intervals));

  bool done = false;
  while (!done) {
    for (int j = 0; j < intervals; ++j)
      pts[size_t(j)] = U_h.points[size_t(idx[size_t(j)])];
    ControlSignal sig = ControlSignal::piecewise(breaks, pts);
    ValueEstimate est = estimate_J(dyn, t0, x0, sig, n_paths, cfg);
    if (est.mean < best_mean) {  // strict: ties keep the earliest candidate
      best_mean = est.mean;
      best = est;
      best_idx = idx;
    }
    // odometer: last interval fastest, so candidates are lexicographic
    int j = intervals - 1;
    while (j >= 0 && ++idx[size_t(j)] == nu) {
      idx[size_t(j)] = 0;
      --j;
    }
    done = (j < 0);
  }

  std::vector<CtrlVec> best_pts(static_cast<size_t>(intervals));
  for (int j = 0; j < intervals; ++j)
    best_pts[size_t(j)] = U_h.points[size_t(best_idx[size_t(j)])];
  return BruteForceResult{best, ControlSignal::piecewise(breaks, best_pts),
                          best_idx, breaks};
}

double dpp_gap(const ControlledDynamics& dyn, double t, double s, const Vec& x,
               const ValueField& field, const ControlSet& U_h, int n_paths,
               const IntegratorConfig& cfg) {
  if (!(t < s) || s > dyn.horizon + 1e-12)
    throw ConfigError("dpp_gap needs t < s <= horizon");
  if (n_paths < 1) throw ConfigError("dpp_gap needs n_paths >= 1");

  const double here = field.eval(t, x);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& u : U_h.points) {
    ControlSignal sig = ControlSignal::constant(u);
    double acc = 0.0;
    for (int p = 0; p < n_paths; ++p) {
      double run = 0.0;
      Vec xs = integrate_observed(dyn, cfg, t, s, x, sig, std::uint64_t(p),
                                  [&](int, double tt, double h, const Vec& xx,
                                      const CtrlVec& uk, const Vec&, double) {
                                    run += h * dyn.running_cost(tt, xx, uk);
                                  });
      acc += run + field.eval(s, xs);
    }
    best = std::min(best, acc / double(n_paths));
  }
  return std::abs(here - best);
}

}  // namespace manoc
