#pragma once

// Path simulation of controlled Stratonovich dynamics through the embedded
// Ito form: one-step update z = x + b0*h + sum_i sigma_i * dW_i followed by
// nearest-point projection (b0 carries the full ambient correction
// (1/2) sum D_sigma sigma). Gaussian increments come from the counter-based
// generator keyed by (seed, path, step, slot), so paths are reproducible and
// independent of evaluation order.

#include <cstdint>
#include <string>
#include <vector>

#include "manoc/fields.hpp"

namespace manoc {

struct IntegratorConfig {
  enum class Scheme { ProjectedEulerIto, ProjectedHeun };

  double dt = 1e-2;
  Scheme scheme = Scheme::ProjectedEulerIto;
  bool project_each_step = true;
  std::uint64_t seed = 0;
};

struct SamplePath {
  std::vector<double> times;      // t0 < ... < t_K = horizon end
  std::vector<Vec> states;        // K+1 states (on M when projecting)
  std::vector<CtrlVec> controls;  // K control points, one per step
  Mat noise;                      // m x K Gaussian increments (scaled by sqrt h)
  std::vector<double> residuals;  // per-step pre-projection dist^2
  double max_offmanifold = 0.0;   // max over steps of the above
};

// step count of the integration grid over [t0, t_end]; a dt larger than the
// span degenerates to a single step of the full span
int num_steps(double t0, double t_end, double dt);

// One-step engine shared by the path recorder and the streaming estimators.
class PathIntegrator {
 public:
  PathIntegrator(const ControlledDynamics& dyn, const IntegratorConfig& cfg);

  // advances x in place across [t, t+h]; returns pre-projection dist^2
  double step(double t, double h, std::uint64_t path, std::uint64_t k, Vec& x,
              const CtrlVec& u) const;

  const ExtensionConfig& extension() const { return ext_; }

 private:
  const ControlledDynamics* dyn_;
  IntegratorConfig cfg_;
  ExtensionConfig ext_;

  double euler_ito(double t, double h, std::uint64_t path, std::uint64_t k,
                   Vec& x, const CtrlVec& u) const;
  double heun(double t, double h, std::uint64_t path, std::uint64_t k, Vec& x,
              const CtrlVec& u) const;
  double finish(Vec& x, const Vec& z) const;
};

// Streaming integration over [t0, t_end]: the observer is invoked once per
// step as obs(k, t_k, h_k, x_k, u_k, x_next, residual_k) after the step
// completes (x_k is the pre-step state); returns the final state. Used by
// the Monte Carlo estimators so large ensembles never materialize paths.
template <class Observer>
Vec integrate_observed(const ControlledDynamics& dyn,
                       const IntegratorConfig& cfg, double t0, double t_end,
                       const Vec& x0, const ControlSignal& u,
                       std::uint64_t path_index, Observer&& obs) {
  PathIntegrator engine(dyn, cfg);
  const int K = num_steps(t0, t_end, cfg.dt);
  Vec x = x0;
  double t = t0;
  for (int k = 0; k < K; ++k) {
    const double h = std::min(cfg.dt, t_end - t);
    const CtrlVec uk = u(t, x);
    const Vec before = x;
    const double resid = engine.step(t, h, path_index, std::uint64_t(k), x, uk);
    obs(k, t, h, before, uk, x, resid);
    t = (k + 1 == K) ? t_end : t0 + (k + 1) * cfg.dt;
  }
  return x;
}

SamplePath simulate_path(const ControlledDynamics& dyn,
                         const IntegratorConfig& cfg, double t0, const Vec& x0,
                         const ControlSignal& u, std::uint64_t path_index = 0);

std::vector<SamplePath> simulate_batch(const ControlledDynamics& dyn,
                                       const IntegratorConfig& cfg, double t0,
                                       const Vec& x0, const ControlSignal& u,
                                       int n_paths);

// max over steps of dist^2(state, M) measured before projection
double off_manifold_residual(const SamplePath& path);

// columns: path_id, step, t, coords..., u..., residual
void export_paths_csv(const std::vector<SamplePath>& paths,
                      const std::string& file);

}  // namespace manoc
