#include "manoc/sde.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace manoc {

int num_steps(double t0, double t_end, double dt) {
  if (dt <= 0) throw ConfigError("dt must be positive");
  if (t_end <= t0) throw ConfigError("empty integration span");
  const double span = t_end - t0;
  if (dt >= span) return 1;
  return std::max(1, int(std::ceil(span / dt - 1e-9)));
}

PathIntegrator::PathIntegrator(const ControlledDynamics& dyn,
                               const IntegratorConfig& cfg)
    : dyn_(&dyn), cfg_(cfg), ext_(ExtensionConfig::for_model(dyn.model)) {}

double PathIntegrator::step(double t, double h, std::uint64_t path,
                            std::uint64_t k, Vec& x, const CtrlVec& u) const {
  return cfg_.scheme == IntegratorConfig::Scheme::ProjectedEulerIto
             ? euler_ito(t, h, path, k, x, u)
             : heun(t, h, path, k, x, u);
}

// pre-projection residual, tube guard, then commit the new state
double PathIntegrator::finish(Vec& x, const Vec& z) const {
  const auto& M = dyn_->model;
  const double resid = M.dist2_to_manifold(z);
  const double tube = M.tubular_radius();
  if (resid >= tube * tube)
    throw OutsideTubularNeighborhood(
        "integration step left the tubular neighborhood (dt too large for "
        "the field bound)");
  x = cfg_.project_each_step ? M.project(z) : z;
  return resid;
}

double PathIntegrator::euler_ito(double t, double h, std::uint64_t path,
                                 std::uint64_t k, Vec& x,
                                 const CtrlVec& u) const {
  const auto& M = dyn_->model;
  const int m = dyn_->num_diffusion;
  const double sqh = std::sqrt(h);
  Vec z;
  if (cfg_.project_each_step) {
    // state is on the manifold: direct field evaluation, closed-form
    // corrections when registered
    z = x + h * ito_drift(*dyn_, ext_, t, x, u);
    for (int i = 0; i < m; ++i)
      z += (sqh * rng::normal(cfg_.seed, path, k, std::uint64_t(i))) *
           dyn_->diffusion[i](t, x, u);
  } else {
    // free-running state: every field through the cutoff extension, with the
    // correction differentiated on the extension itself
    Vec b0 = extend_field(M, ext_, dyn_->drift, t, x, u);
    for (int i = 0; i < m; ++i) {
      Vec si = extend_field(M, ext_, dyn_->diffusion[i], t, x, u);
      b0 += 0.5 * ambient_derivative(M, ext_, dyn_->diffusion[i], t, x, u, si,
                                     nullptr);
    }
    z = x + h * b0;
    for (int i = 0; i < m; ++i)
      z += (sqh * rng::normal(cfg_.seed, path, k, std::uint64_t(i))) *
           extend_field(M, ext_, dyn_->diffusion[i], t, x, u);
  }
  return finish(x, z);
}

double PathIntegrator::heun(double t, double h, std::uint64_t path,
                            std::uint64_t k, Vec& x, const CtrlVec& u) const {
  const auto& M = dyn_->model;
  const int m = dyn_->num_diffusion;
  const double sqh = std::sqrt(h);
  const bool on_m = cfg_.project_each_step;

  // fields at the current state (direct when it sits on the manifold)
  auto at_x = [&](const TimeField& F) {
    return on_m ? F(t, x, u) : extend_field(M, ext_, F, t, x, u);
  };

  // Stratonovich predictor-corrector: no correction drift, the midpoint
  // average supplies it
  Vec b = at_x(dyn_->drift);
  std::vector<Vec> sig(static_cast<size_t>(m));
  std::vector<double> dw(static_cast<size_t>(m));
  Vec pred = x + h * b;
  for (int i = 0; i < m; ++i) {
    sig[size_t(i)] = at_x(dyn_->diffusion[i]);
    dw[size_t(i)] = sqh * rng::normal(cfg_.seed, path, k, std::uint64_t(i));
    pred += dw[size_t(i)] * sig[size_t(i)];
  }
  Vec z = x + 0.5 * h * (b + extend_field(M, ext_, dyn_->drift, t + h, pred, u));
  for (int i = 0; i < m; ++i)
    z += 0.5 * dw[size_t(i)] *
         (sig[size_t(i)] +
          extend_field(M, ext_, dyn_->diffusion[i], t + h, pred, u));
  return finish(x, z);
}

SamplePath simulate_path(const ControlledDynamics& dyn,
                         const IntegratorConfig& cfg, double t0, const Vec& x0,
                         const ControlSignal& u, std::uint64_t path_index) {
  if (!dyn.model.on_manifold(x0))
    throw ConfigError("initial state is not on the manifold");
  const double T = dyn.horizon;
  const int K = num_steps(t0, T, cfg.dt);
  const int m = dyn.num_diffusion;

  SamplePath p;
  p.times.reserve(size_t(K) + 1);
  p.states.reserve(size_t(K) + 1);
  p.controls.reserve(size_t(K));
  p.residuals.reserve(size_t(K));
  p.noise = Mat::Zero(m, K);
  p.times.push_back(t0);
  p.states.push_back(x0);

  Vec xT = integrate_observed(
      dyn, cfg, t0, T, x0, u, path_index,
      [&](int k, double t, double h, const Vec&, const CtrlVec& uk,
          const Vec& next, double resid) {
        p.times.push_back(k + 1 == K ? T : t + h);
        p.states.push_back(next);
        p.controls.push_back(uk);
        p.residuals.push_back(resid);
        p.max_offmanifold = std::max(p.max_offmanifold, resid);
        for (int i = 0; i < m; ++i)
          p.noise(i, k) = std::sqrt(h) * rng::normal(cfg.seed, path_index,
                                                     std::uint64_t(k),
                                                     std::uint64_t(i));
      });
  (void)xT;
  return p;
}

std::vector<SamplePath> simulate_batch(const ControlledDynamics& dyn,
                                       const IntegratorConfig& cfg, double t0,
                                       const Vec& x0, const ControlSignal& u,
                                       int n_paths) {
  if (n_paths < 1) throw ConfigError("n_paths must be >= 1");
  std::vector<SamplePath> out(static_cast<size_t>(n_paths));
  parallel_for(size_t(n_paths), [&](size_t p) {
    out[p] = simulate_path(dyn, cfg, t0, x0, u, std::uint64_t(p));
  });
  return out;
}

double off_manifold_residual(const SamplePath& path) {
  return path.max_offmanifold;
}

void export_paths_csv(const std::vector<SamplePath>& paths,
                      const std::string& file) {
  std::ofstream out(file);
  if (!out) throw ConfigError("cannot open " + file + " for writing");
  const int d = paths.empty() ? 0 : int(paths.front().states.front().size());
  const int cu = paths.empty() || paths.front().controls.empty()
                     ? 0
                     : int(paths.front().controls.front().size());
  out << "path_id,step,t";
  for (int i = 0; i < d; ++i) out << ",x" << i;
  for (int i = 0; i < cu; ++i) out << ",u" << i;
  out << ",residual\n";
  char buf[64];
  auto fmt = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (size_t p = 0; p < paths.size(); ++p) {
    const auto& sp = paths[p];
    for (size_t k = 0; k < sp.states.size(); ++k) {
      out << p << ',' << k << ',' << fmt(sp.times[k]);
      for (int i = 0; i < d; ++i) out << ',' << fmt(sp.states[k][i]);
      // control applied on the step starting at t_k (last row repeats the
      // final step's control); residual is the one that produced state k
      const size_t kc = std::min(k, sp.controls.size() - 1);
      for (int i = 0; i < cu; ++i) out << ',' << fmt(sp.controls[kc][i]);
      out << ',' << fmt(k == 0 ? 0.0 : sp.residuals[k - 1]) << "\n";
    }
  }
}

}  // namespace manoc
