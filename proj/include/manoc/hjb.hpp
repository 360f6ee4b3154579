#pragma once

// Backward-in-time value computation on a manifold grid: a monotone
// semi-Lagrangian scheme whose characteristic feet are exponential-map steps,
// Hamiltonian evaluation from locally fitted derivatives, residual
// measurement, feedback synthesis and closed-loop verification.

#include "manoc/grid.hpp"
#include "manoc/value.hpp"

namespace manoc {

// First/second derivative data of a scalar field at a point: chi holds the
// gradient coefficients and A the symmetric Hessian matrix, both expressed in
// the columns of `basis` (an orthonormal tangent basis).
struct LocalDerivatives {
  Vec point;           // base point x
  Mat basis;           // ambient_dim x d, orthonormal columns
  double value = 0.0;  // fitted field value at x
  Vec chi;             // d gradient coefficients
  Mat A;               // d x d symmetric Hessian matrix

  // chi applied to an ambient tangent vector
  double pair(const Vec& w) const;
  // A applied to a pair of ambient tangent vectors
  double quad(const Vec& v, const Vec& w) const;
};

// (1/2) sum_i A(sigma_i, sigma_i) + chi(b + (1/2) sum_i D_{sigma_i} sigma_i)
// + f(t,x,u), with the covariant (projected) correction term.
double hamiltonian(const ControlledDynamics& dyn, double t, const Vec& x,
                   const CtrlVec& u, const LocalDerivatives& deriv);

struct HamiltonianMin {
  double value = 0.0;
  int index = -1;   // position in U_h.points; ties keep the lowest index
  CtrlVec control;
};

HamiltonianMin min_hamiltonian(const ControlledDynamics& dyn, double t,
                               const Vec& x, const LocalDerivatives& deriv,
                               const ControlSet& U_h);

// One backward step: from the slice at t+dt to the slice at t,
//   V(t,x) = min_u { f(t,x,u) dt
//                    + (1/2m) sum_i [ V~(exp_x(dt b0 + sqrt(m dt) sigma_i))
//                                   + V~(exp_x(dt b0 - sqrt(m dt) sigma_i)) ] }
// with b0 the covariant-corrected drift and V~ the grid interpolant; m = 0
// degenerates to V~(exp_x(dt b)). Guard: C_B dt + sqrt(2 m dt) C_B must stay
// below the safe radius (StepTooLarge).
RVec semi_lagrangian_step(const ControlledDynamics& dyn,
                          const ManifoldGrid& grid, const RVec& v_next,
                          double t, double dt, const ControlSet& U_h);

// Iterates semi_lagrangian_step from the terminal condition V(T,.) = h down
// to t = 0 on a uniform time grid with K = round(T/dt) slices.
ValueField solve_backward(const ControlledDynamics& dyn,
                          const ManifoldGrid& grid, double dt,
                          const ControlSet& U_h);

// Weighted least-squares fit of the time-interpolated field over the log-map
// coordinates of the stencil around x (interpolation-support vertices plus
// their neighbor rings); exact on fields quadratic in normal coordinates.
// Widens the stencil once before giving up (DegenerateStencil).
LocalDerivatives local_derivatives(const ValueField& field, double t,
                                   const Vec& x);

// | d/dt V~ + min_u H |, the time derivative by central differences on
// interior slices (one-sided at the ends).
double hjb_residual(const ControlledDynamics& dyn, const ValueField& field,
                    double t, const Vec& x, const ControlSet& U_h);

// argmin of the Hamiltonian at (t,x) over U_h given the fitted derivatives;
// deterministic tie-break by control index.
CtrlVec feedback_control(const ControlledDynamics& dyn,
                         const ValueField& field, double t, const Vec& x,
                         const ControlSet& U_h);

struct ClosedLoopGap {
  double gap = 0.0;        // estimate.mean - field_value
  double std_error = 0.0;  // Monte Carlo stderr of the estimate
  ValueEstimate estimate;  // cost of the synthesized feedback policy
  double field_value = 0.0;  // V~(t0, x0)
};

// Simulates the feedback policy induced by the field and compares its Monte
// Carlo cost against the field's own value at (t0, x0).
ClosedLoopGap closed_loop_gap(const ControlledDynamics& dyn,
                              const ValueField& field, double t0,
                              const Vec& x0, const ControlSet& U_h,
                              int n_paths, const IntegratorConfig& cfg);

}  // namespace manoc
