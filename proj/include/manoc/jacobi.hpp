#pragma once

// Jacobi fields along geodesic segments, the second-variation Hessian of the
// squared distance, and numerical certification of the associated estimates
// (transport comparison, matrix structure, geodesic-deviation ratios).
//
// The ODE is J'' + R(J, gamma') gamma' = 0, integrated with classical RK4 in
// a parallel orthonormal frame whose last vector is the geodesic velocity;
// for the constant-curvature models the curvature term is kappa * (normal
// components of J).

#include "manoc/geometry.hpp"

namespace manoc {

struct GeodesicSegment {
  Manifold M = Manifold::circle();
  Vec x, y;
  double length = 0.0;  // rho(x,y), 0 < length <= r_m
  Vec v0;               // unit initial velocity log_x(y)/length
  int samples = 0;      // P: sample times s_p = p * length / P, p = 0..P
  Mat frame0;           // orthonormal tangent basis at x, last column = v0

  double step() const { return length / samples; }
  Vec point_at(double s) const;
  // Parallel transport of frame0 to gamma(s).
  Mat frame_at(double s) const;
};

// Throws StepTooLarge when rho(x,y) > r_m, ConfigError on coincident points.
GeodesicSegment make_segment(const Manifold& M, const Vec& x, const Vec& y);

struct JacobiField {
  GeodesicSegment seg;
  Mat J;   // (P+1) x n frame components of J(s_p)
  Mat Jp;  // (P+1) x n frame components of J'(s_p)

  double max_norm() const;
  // Worst deviation of the stored samples from the component ODE, measured
  // with a 4th-order interior second-difference stencil.
  double ode_residual() const;
  Vec ambient_value(int p) const;  // J(s_p) as an ambient vector
};

// Initial-value integration: J(0) = v, J'(0) = vp (tangent at x).
JacobiField integrate_jacobi(const GeodesicSegment& seg, const Vec& v,
                             const Vec& vp);

// Two-point boundary problem: J(0) = v (tangent at x), J(l) = w (tangent at
// y); the unique solution for l <= r_m. Throws ConjugatePoint if the endpoint
// map degenerates (cannot happen under the guard).
JacobiField boundary_jacobi(const GeodesicSegment& seg, const Vec& v,
                            const Vec& w);

// Second variation of rho^2 in the product direction (v, w):
// A((v,w)^{x2}) = 2 l (<w, J'(l)> - <v, J'(0)>) with J = boundary_jacobi.
double distance_hessian_quadform(const Manifold& M, const Vec& x, const Vec& y,
                                 const Vec& v, const Vec& w);

struct DistanceHessian {
  Vec x, y;
  double rho = 0.0;
  Mat basis_x, basis_y;  // synchronized: transport(x->y) basis_x_i = basis_y_i
  Mat A;                 // 2n x 2n symmetric, entries in the synchronized bases
};

// Full matrix, assembled entrywise from quadforms via the quarter-difference
// polarization identity over the synchronized product basis.
DistanceHessian distance_hessian_matrix(const Manifold& M, const Vec& x,
                                        const Vec& y);

// The flat-limit matrix [[I, -I], [-I, I]] of size 2n.
Mat hessian_flat_limit(int n);

struct CertifyReport {
  double rho = 0.0;
  int n_samples = 0;
  // max over samples of |A((v,w)^{x2}) - 2||w - Lv||^2| / ((||v||+||w||)^2 rho^2)
  double max_transport_deviation = 0.0;
  double max_entry_A2_minus_4A = 0.0;
  double max_entry_A2_minus_4A_over_rho2 = 0.0;
  double min_j1_ratio = 1.0, max_j1_ratio = 1.0;  // ||J1(t)|| / ||v||
  double max_ode_residual = 0.0;
  double max_boundary_ratio = 0.0;  // max_t ||J(t)|| / (||v|| + ||w||)
};

CertifyReport certify_estimates(const Manifold& M, const Vec& x, const Vec& y,
                                int n_samples, std::uint64_t seed);

}  // namespace manoc
