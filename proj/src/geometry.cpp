#include "manoc/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace manoc {

namespace {

constexpr double kCutTol = 1e-9;    // cut-locus detection margin
constexpr double kZeroLen = 1e-14;  // below this a tangent counts as zero

double clamp1(double x) { return std::min(1.0, std::max(-1.0, x)); }

// Factor-circle radius of the Clifford torus.
const double kTorusR = 1.0 / std::sqrt(2.0);

// Unit sphere in R^d helpers (d = 2, 3, 4 cover circle/sphere2/sphere3).
// Distance via the chord keeps full accuracy at both ends of [0, pi].
double sphere_distance(const Vec& x, const Vec& y) {
  return 2.0 * std::asin(clamp1(0.5 * (x - y).norm()));
}

Vec sphere_exp(const Vec& x, const Vec& v) {
  const double th = v.norm();
  if (th < kZeroLen) return x;
  Vec y = std::cos(th) * x + (std::sin(th) / th) * v;
  y /= y.norm();  // re-normalize to keep the on-manifold invariant exact
  return y;
}

Vec sphere_log(const Vec& x, const Vec& y, double inj) {
  const double th = sphere_distance(x, y);
  if (th >= inj - kCutTol)
    throw CutLocus("log undefined: points at or beyond the cut locus");
  Vec w = y - x.dot(y) * x;
  const double n = w.norm();
  if (n < kZeroLen) return Vec::Zero(x.size());
  return (th / n) * w;
}

Vec sphere_transport(const Vec& x, const Vec& y, const Vec& v, double inj) {
  const double th = sphere_distance(x, y);
  if (th < kZeroLen) return v;
  Vec u = sphere_log(x, y, inj);
  u /= th;  // unit initial velocity
  const double a = v.dot(u);
  return v + a * ((std::cos(th) - 1.0) * u - std::sin(th) * x);
}

// Signed angle from pair a=(a0,a1) to pair b=(b0,b1) on a factor circle.
double pair_angle(double a0, double a1, double b0, double b1) {
  return std::atan2(a0 * b1 - a1 * b0, a0 * b0 + a1 * b1);
}

// Unit tangents of the two torus factor circles at x.
void torus_frame(const Vec& x, Vec& t1, Vec& t2) {
  const double r1 = std::hypot(x[0], x[1]);
  const double r2 = std::hypot(x[2], x[3]);
  t1 = Vec::Zero(4);
  t2 = Vec::Zero(4);
  t1[0] = -x[1] / r1;
  t1[1] = x[0] / r1;
  t2[2] = -x[3] / r2;
  t2[3] = x[2] / r2;
}

Vec rotate_pair(const Vec& x, int off, double phi) {
  Vec y = x;
  const double c = std::cos(phi), s = std::sin(phi);
  y[off] = c * x[off] - s * x[off + 1];
  y[off + 1] = s * x[off] + c * x[off + 1];
  return y;
}

}  // namespace

Manifold::Manifold(ModelKind kind, std::string name, int ambient, int intrinsic,
                   double inj, double cr, double sectional, double eps)
    : kind_(kind),
      name_(std::move(name)),
      ambient_dim_(ambient),
      intrinsic_dim_(intrinsic),
      inj_radius_(inj),
      curvature_bound_(cr),
      sectional_(sectional),
      tubular_radius_(eps) {
  const double c1 = std::max(curvature_bound_, 1.0);
  safe_radius_ = std::min({0.5 * inj_radius_, std::sqrt(1.0 / (2.0 * c1)), 1.0});
}

Manifold Manifold::circle() {
  return Manifold(ModelKind::Circle, "circle", 2, 1, M_PI, 0.0, 0.0, 0.9);
}
Manifold Manifold::sphere2() {
  return Manifold(ModelKind::Sphere2, "sphere2", 3, 2, M_PI, 1.0, 1.0, 0.9);
}
Manifold Manifold::torus2() {
  return Manifold(ModelKind::Torus2, "torus2", 4, 2, M_PI * kTorusR, 0.0, 0.0,
                  0.5);
}
Manifold Manifold::sphere3() {
  return Manifold(ModelKind::Sphere3, "sphere3", 4, 3, M_PI, 1.0, 1.0, 0.9);
}

Manifold Manifold::by_name(const std::string& name) {
  if (name == "circle") return circle();
  if (name == "sphere2") return sphere2();
  if (name == "torus2") return torus2();
  if (name == "sphere3") return sphere3();
  throw ConfigError("unknown manifold model: " + name);
}

double Manifold::dist2_to_manifold(const Vec& z) const {
  if (kind_ == ModelKind::Torus2) {
    const double d1 = std::hypot(z[0], z[1]) - kTorusR;
    const double d2 = std::hypot(z[2], z[3]) - kTorusR;
    return d1 * d1 + d2 * d2;
  }
  const double d = z.norm() - 1.0;
  return d * d;
}

bool Manifold::on_manifold(const Vec& z) const {
  return z.size() == ambient_dim_ &&
         dist2_to_manifold(z) <= on_manifold_tol() * on_manifold_tol();
}

Vec Manifold::project(const Vec& z) const {
  if (kind_ == ModelKind::Torus2) {
    const double r1 = std::hypot(z[0], z[1]);
    const double r2 = std::hypot(z[2], z[3]);
    if (r1 < kZeroLen || r2 < kZeroLen)
      throw OutsideTubularNeighborhood(
          "projection multivalued on a torus factor axis");
    Vec y(4);
    y[0] = kTorusR * z[0] / r1;
    y[1] = kTorusR * z[1] / r1;
    y[2] = kTorusR * z[2] / r2;
    y[3] = kTorusR * z[3] / r2;
    return y;
  }
  const double r = z.norm();
  if (r < kZeroLen)
    throw OutsideTubularNeighborhood("projection multivalued at the center");
  return z / r;
}

Vec Manifold::tangent_project(const Vec& x, const Vec& v) const {
  if (kind_ == ModelKind::Torus2) {
    Vec t1, t2;
    torus_frame(x, t1, t2);
    return v.dot(t1) * t1 + v.dot(t2) * t2;
  }
  return v - v.dot(x) * x;
}

Vec Manifold::exp(const Vec& x, const Vec& v, bool* beyond_injectivity) const {
  if (beyond_injectivity) *beyond_injectivity = v.norm() >= inj_radius_;
  switch (kind_) {
    case ModelKind::Circle: {
      // rotate by the signed tangent component (arc length)
      const double s = v[0] * (-x[1]) + v[1] * x[0];
      return rotate_pair(x, 0, s);
    }
    case ModelKind::Torus2: {
      Vec t1, t2;
      torus_frame(x, t1, t2);
      Vec y = rotate_pair(x, 0, v.dot(t1) / kTorusR);
      return rotate_pair(y, 2, v.dot(t2) / kTorusR);
    }
    default:
      return sphere_exp(x, v);
  }
}

Vec Manifold::log(const Vec& x, const Vec& y) const {
  switch (kind_) {
    case ModelKind::Circle: {
      const double d = pair_angle(x[0], x[1], y[0], y[1]);
      if (std::abs(d) >= inj_radius_ - kCutTol)
        throw CutLocus("log undefined: antipodal circle points");
      Vec t(2);
      t[0] = -x[1];
      t[1] = x[0];
      return d * t;
    }
    case ModelKind::Torus2: {
      const double d1 = pair_angle(x[0], x[1], y[0], y[1]);
      const double d2 = pair_angle(x[2], x[3], y[2], y[3]);
      const double rho = kTorusR * std::hypot(d1, d2);
      if (rho >= inj_radius_ - kCutTol)
        throw CutLocus("log undefined: torus cut locus");
      Vec t1, t2;
      torus_frame(x, t1, t2);
      return (kTorusR * d1) * t1 + (kTorusR * d2) * t2;
    }
    default:
      return sphere_log(x, y, inj_radius_);
  }
}

double Manifold::distance(const Vec& x, const Vec& y) const {
  switch (kind_) {
    case ModelKind::Circle:
      return std::abs(pair_angle(x[0], x[1], y[0], y[1]));
    case ModelKind::Torus2: {
      const double d1 = pair_angle(x[0], x[1], y[0], y[1]);
      const double d2 = pair_angle(x[2], x[3], y[2], y[3]);
      return kTorusR * std::hypot(d1, d2);
    }
    default:
      return sphere_distance(x, y);
  }
}

Vec Manifold::transport(const Vec& x, const Vec& y, const Vec& v) const {
  switch (kind_) {
    case ModelKind::Circle: {
      Vec tx(2), ty(2);
      tx[0] = -x[1];
      tx[1] = x[0];
      ty[0] = -y[1];
      ty[1] = y[0];
      return v.dot(tx) * ty;
    }
    case ModelKind::Torus2: {
      // the factor frame is globally parallel on the flat torus
      Vec t1x, t2x, t1y, t2y;
      torus_frame(x, t1x, t2x);
      torus_frame(y, t1y, t2y);
      return v.dot(t1x) * t1y + v.dot(t2x) * t2y;
    }
    default:
      return sphere_transport(x, y, v, inj_radius_);
  }
}

std::pair<Vec, Vec> Manifold::grad_dist2(const Vec& x, const Vec& y) const {
  return {-2.0 * log(x, y), -2.0 * log(y, x)};
}

Mat Manifold::tangent_basis(const Vec& x) const {
  Mat B(ambient_dim_, intrinsic_dim_);
  switch (kind_) {
    case ModelKind::Circle: {
      B(0, 0) = -x[1];
      B(1, 0) = x[0];
      return B;
    }
    case ModelKind::Torus2: {
      Vec t1, t2;
      torus_frame(x, t1, t2);
      B.col(0) = t1;
      B.col(1) = t2;
      return B;
    }
    default: {
      // complete x to an orthonormal ambient basis; drop the first column
      Eigen::MatrixXd xm(ambient_dim_, 1);
      for (int i = 0; i < ambient_dim_; ++i) xm(i, 0) = x[i];
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(xm);
      Mat Q = qr.householderQ();
      for (int j = 0; j < intrinsic_dim_; ++j) B.col(j) = Q.col(j + 1);
      return B;
    }
  }
}

Vec Manifold::sample_point(std::uint64_t seed, std::uint64_t idx) const {
  Vec z(ambient_dim_);
  for (int d = 0; d < ambient_dim_; ++d)
    z[d] = rng::normal(seed, idx, 0x5a5a, static_cast<std::uint64_t>(d));
  if (kind_ == ModelKind::Torus2) {
    // gaussian per factor pair; retry deterministically on degenerate draws
    for (std::uint64_t bump = 1; std::hypot(z[0], z[1]) < 1e-6 ||
                                 std::hypot(z[2], z[3]) < 1e-6;
         ++bump)
      for (int d = 0; d < 4; ++d)
        z[d] = rng::normal(seed, idx, 0x5a5a + bump,
                           static_cast<std::uint64_t>(d));
    return project(z);
  }
  for (std::uint64_t bump = 1; z.norm() < 1e-6; ++bump)
    for (int d = 0; d < ambient_dim_; ++d)
      z[d] =
          rng::normal(seed, idx, 0x5a5a + bump, static_cast<std::uint64_t>(d));
  return z / z.norm();
}

Vec Manifold::sample_tangent(const Vec& x, std::uint64_t seed,
                             std::uint64_t idx) const {
  Vec v(ambient_dim_);
  for (std::uint64_t bump = 0;; ++bump) {
    for (int d = 0; d < ambient_dim_; ++d)
      v[d] = rng::normal(seed, idx, 0x7e7e + bump,
                         static_cast<std::uint64_t>(d));
    v = tangent_project(x, v);
    if (v.norm() > 1e-6) return v;
  }
}

}  // namespace manoc
