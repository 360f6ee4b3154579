#pragma once

// Controlled vector fields (b, sigma_i), running/terminal costs, the cutoff
// extension of tangent fields to ambient space, and the Stratonovich-to-Ito
// correction drift. Ambient directional derivatives fall back to central
// finite differences on the extension unless a closed form is registered.

#include "manoc/control.hpp"
#include "manoc/core.hpp"
#include "manoc/geometry.hpp"

#include <functional>
#include <vector>

namespace manoc {

// Tangent field value at (t, x, u), in ambient coordinates.
using TimeField = std::function<Vec(double, const Vec&, const CtrlVec&)>;
// Closed-form derivative d/ds X(t, c(s), u)|0 along any curve c inside the
// manifold with c(0) = x, c'(0) = v; the value is ambient (tangential part =
// covariant derivative, normal part = second fundamental form term).
using TimeFieldDeriv =
    std::function<Vec(double, const Vec&, const CtrlVec&, const Vec&)>;
using CostFn = std::function<double(double, const Vec&, const CtrlVec&)>;
using TerminalFn = std::function<double(const Vec&)>;

struct ExtensionConfig {
  double epsilon = 0.0;  // tube width of the cutoff, 0 < epsilon <= eps_M

  static ExtensionConfig for_model(const Manifold& M) {
    return ExtensionConfig{0.5 * M.tubular_radius()};
  }

  // lambda(s) = (s - eps^2)^2 / eps^4 for s in [0, eps^2], 0 beyond;
  // s is the squared distance to the manifold.
  double cutoff(double s) const {
    const double e2 = epsilon * epsilon;
    if (s >= e2) return 0.0;
    const double r = (s - e2) / e2;
    return r * r;
  }
};

struct ControlledDynamics {
  Manifold model = Manifold::circle();
  int num_diffusion = 0;  // m
  TimeField drift;                      // b(t,x,u), tangent at x
  std::vector<TimeField> diffusion;     // sigma_i(t,x,u), tangent at x
  CostFn running_cost;                  // f(t,x,u)
  TerminalFn terminal_cost;             // h(x)
  double field_bound = 1.0;             // C_B: sup ||b|| + sum||sigma|| + |f|
  double field_lipschitz = 1.0;         // C_L
  double horizon = 1.0;                 // T
  // Optional closed forms for d/ds sigma_i along curves in M (same order as
  // `diffusion`); empty means finite differences on the extension.
  std::vector<TimeFieldDeriv> diffusion_deriv;

  bool has_closed_form_derivs() const {
    return !diffusion_deriv.empty() &&
           diffusion_deriv.size() == diffusion.size();
  }
};

struct DynamicsValues {
  Vec drift;
  std::vector<Vec> diffusion;
  double running_cost = 0.0;
};

// Evaluates b, every sigma_i and f at (t,x,u); throws NonTangentField when a
// field value fails the tangency check (tolerance 1e-8 * max(1, ||value||)).
DynamicsValues eval_dynamics(const ControlledDynamics& dyn, double t,
                             const Vec& x, const CtrlVec& u);

// Cutoff extension: X(pi(z), u) * lambda(dist^2(z, M)); zero outside the
// epsilon-tube. Defined on all of ambient space.
Vec extend_field(const Manifold& M, const ExtensionConfig& cfg,
                 const TimeField& X, double t, const Vec& z, const CtrlVec& u);

// Ambient directional derivative d/ds Xbar(x + s v)|0 of the extension, by
// central differences with step h_fd = 1e-5, or the registered closed form.
Vec ambient_derivative(const Manifold& M, const ExtensionConfig& cfg,
                       const TimeField& X, double t, const Vec& x,
                       const CtrlVec& u, const Vec& v,
                       const TimeFieldDeriv* closed_form = nullptr);

// Intrinsic covariant derivative: tangential part of ambient_derivative.
Vec covariant_derivative(const Manifold& M, const ExtensionConfig& cfg,
                         const TimeField& X, double t, const Vec& x,
                         const CtrlVec& u, const Vec& v,
                         const TimeFieldDeriv* closed_form = nullptr);

// b + (1/2) sum_i P_x(D_{sigma_i} sigma_i): the tangent corrected drift that
// enters the Hamiltonian.
Vec stratonovich_drift(const ControlledDynamics& dyn,
                       const ExtensionConfig& cfg, double t, const Vec& x,
                       const CtrlVec& u);

// b + (1/2) sum_i D^E_{sigma_i} sigma_i with the full ambient derivative
// (normal part included): the corrected drift the Ito stepper integrates.
Vec ito_drift(const ControlledDynamics& dyn, const ExtensionConfig& cfg,
              double t, const Vec& x, const CtrlVec& u);

}  // namespace manoc
