#pragma once

// Exact differential geometry for the supported compact manifolds, all in
// ambient coordinates through explicit isometric embeddings:
//   circle  S^1 in R^2, sphere2 S^2 in R^3, sphere3 S^3 in R^4,
//   torus2  = Clifford torus in R^4 (two factor circles of radius 1/sqrt(2)).
// Every map (projection, exp, log, distance, transport) is a closed form, so
// roundtrip identities hold to floating-point accuracy.

#include "manoc/core.hpp"

#include <utility>

namespace manoc {

enum class ModelKind { Circle, Sphere2, Torus2, Sphere3 };

class Manifold {
 public:
  static Manifold circle();
  static Manifold sphere2();
  static Manifold torus2();
  static Manifold sphere3();
  static Manifold by_name(const std::string& name);  // ConfigError on unknown

  const std::string& name() const { return name_; }
  ModelKind kind() const { return kind_; }
  int ambient_dim() const { return ambient_dim_; }   // n1
  int dim() const { return intrinsic_dim_; }         // n

  double injectivity_radius() const { return inj_radius_; }
  double curvature_bound() const { return curvature_bound_; }  // C_R
  // Constant sectional curvature of the model (0 flat, 1 round spheres).
  double sectional_curvature() const { return sectional_; }
  double tubular_radius() const { return tubular_radius_; }    // eps_M
  // r_m = min{ i_M/2, sqrt(1/(2*C1)), 1 } with C1 = max(C_R, 1).
  double safe_radius() const { return safe_radius_; }
  double on_manifold_tol() const { return 1e-9; }

  // Squared ambient distance from z to the manifold.
  double dist2_to_manifold(const Vec& z) const;
  bool on_manifold(const Vec& z) const;

  // Nearest-point projection. Throws OutsideTubularNeighborhood where the
  // nearest point is not unique (focal set: the origin / a factor axis).
  Vec project(const Vec& z) const;

  // Orthogonal projection of v onto the tangent space at x (x on manifold).
  Vec tangent_project(const Vec& x, const Vec& v) const;

  // Geodesic flow: point reached after unit time from x with velocity v.
  // Optionally reports whether ||v|| reached the injectivity radius.
  Vec exp(const Vec& x, const Vec& v, bool* beyond_injectivity = nullptr) const;

  // Inverse of exp on the ball of radius i_M; throws CutLocus when
  // distance(x,y) >= i_M - 1e-9 (exactly antipodal requests always error).
  Vec log(const Vec& x, const Vec& y) const;

  double distance(const Vec& x, const Vec& y) const;

  // Parallel transport of tangent v along the minimizing geodesic x -> y.
  // x == y returns v; throws CutLocus like log.
  Vec transport(const Vec& x, const Vec& y, const Vec& v) const;

  // ( grad_x rho^2, grad_y rho^2 ) = ( -2 log_x(y), -2 log_y(x) ).
  std::pair<Vec, Vec> grad_dist2(const Vec& x, const Vec& y) const;

  // Orthonormal basis of the tangent space at x, as ambient columns.
  Mat tangent_basis(const Vec& x) const;

  // Deterministic samplers used by tests and certification sweeps.
  Vec sample_point(std::uint64_t seed, std::uint64_t idx) const;
  Vec sample_tangent(const Vec& x, std::uint64_t seed, std::uint64_t idx) const;

 private:
  Manifold(ModelKind kind, std::string name, int ambient, int intrinsic,
           double inj, double cr, double sectional, double eps);

  ModelKind kind_;
  std::string name_;
  int ambient_dim_;
  int intrinsic_dim_;
  double inj_radius_;
  double curvature_bound_;
  double sectional_;
  double tubular_radius_;
  double safe_radius_;
};

}  // namespace manoc
