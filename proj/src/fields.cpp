#include "manoc/fields.hpp"

#include <cmath>

namespace manoc {

namespace {

constexpr double kFdStep = 1e-5;  // central-difference step for derivatives

void check_tangent(const Manifold& M, const Vec& x, const Vec& value,
                   const char* what) {
  const double tol = 1e-8 * std::max(1.0, value.norm());
  if ((value - M.tangent_project(x, value)).norm() > tol)
    throw NonTangentField(std::string(what) +
                          " returned a vector outside the tangent space");
}

}  // namespace

DynamicsValues eval_dynamics(const ControlledDynamics& dyn, double t,
                             const Vec& x, const CtrlVec& u) {
  DynamicsValues out;
  out.drift = dyn.drift(t, x, u);
  check_tangent(dyn.model, x, out.drift, "drift");
  out.diffusion.reserve(dyn.diffusion.size());
  for (const auto& sigma : dyn.diffusion) {
    out.diffusion.push_back(sigma(t, x, u));
    check_tangent(dyn.model, x, out.diffusion.back(), "diffusion field");
  }
  out.running_cost = dyn.running_cost ? dyn.running_cost(t, x, u) : 0.0;
  if (!std::isfinite(out.running_cost))
    throw NonTangentField("running cost evaluated to a non-finite value");
  return out;
}

Vec extend_field(const Manifold& M, const ExtensionConfig& cfg,
                 const TimeField& X, double t, const Vec& z, const CtrlVec& u) {
  const double s2 = M.dist2_to_manifold(z);
  if (s2 >= cfg.epsilon * cfg.epsilon) return Vec::Zero(z.size());
  return Vec(X(t, M.project(z), u) * cfg.cutoff(s2));
}

Vec ambient_derivative(const Manifold& M, const ExtensionConfig& cfg,
                       const TimeField& X, double t, const Vec& x,
                       const CtrlVec& u, const Vec& v,
                       const TimeFieldDeriv* closed_form) {
  if (closed_form && *closed_form) return (*closed_form)(t, x, u, v);
  const Vec plus = extend_field(M, cfg, X, t, Vec(x + kFdStep * v), u);
  const Vec minus = extend_field(M, cfg, X, t, Vec(x - kFdStep * v), u);
  return Vec((plus - minus) / (2.0 * kFdStep));
}

Vec covariant_derivative(const Manifold& M, const ExtensionConfig& cfg,
                         const TimeField& X, double t, const Vec& x,
                         const CtrlVec& u, const Vec& v,
                         const TimeFieldDeriv* closed_form) {
  return M.tangent_project(
      x, ambient_derivative(M, cfg, X, t, x, u, v, closed_form));
}

namespace {

// b + (1/2) sum_i D^E_{sigma_i} sigma_i, optionally projected to T_xM.
Vec corrected_drift(const ControlledDynamics& dyn, const ExtensionConfig& cfg,
                    double t, const Vec& x, const CtrlVec& u, bool project) {
  Vec out = dyn.drift(t, x, u);
  check_tangent(dyn.model, x, out, "drift");
  const bool closed = dyn.has_closed_form_derivs();
  for (std::size_t i = 0; i < dyn.diffusion.size(); ++i) {
    const Vec si = dyn.diffusion[i](t, x, u);
    check_tangent(dyn.model, x, si, "diffusion field");
    const TimeFieldDeriv* form = closed ? &dyn.diffusion_deriv[i] : nullptr;
    Vec d =
        ambient_derivative(dyn.model, cfg, dyn.diffusion[i], t, x, u, si, form);
    if (project) d = dyn.model.tangent_project(x, d);
    out += 0.5 * d;
  }
  return out;
}

}  // namespace

Vec stratonovich_drift(const ControlledDynamics& dyn,
                       const ExtensionConfig& cfg, double t, const Vec& x,
                       const CtrlVec& u) {
  return corrected_drift(dyn, cfg, t, x, u, /*project=*/true);
}

Vec ito_drift(const ControlledDynamics& dyn, const ExtensionConfig& cfg,
              double t, const Vec& x, const CtrlVec& u) {
  return corrected_drift(dyn, cfg, t, x, u, /*project=*/false);
}

}  // namespace manoc
