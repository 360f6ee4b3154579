#include "manoc/jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace manoc {

namespace {

constexpr double kCoincident = 1e-12;

// Fundamental solutions of the frame-component system Phi'' = K Phi with
// K = -kappa * (identity with the tangential slot zeroed). A and B carry
// initial data (I, 0) and (0, I); every Jacobi field is A*a + B*b.
struct Fundamental {
  std::vector<Mat> A, Ap, B, Bp;
};

void rk4_step(Mat& X, Mat& Xp, double h, const Mat& K) {
  Mat k1 = Xp, k1p = K * X;
  Mat k2 = Xp + 0.5 * h * k1p, k2p = K * (X + 0.5 * h * k1);
  Mat k3 = Xp + 0.5 * h * k2p, k3p = K * (X + 0.5 * h * k2);
  Mat k4 = Xp + h * k3p, k4p = K * (X + h * k3);
  X += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  Xp += (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
}

Fundamental integrate_fundamental(const GeodesicSegment& seg) {
  const int n = seg.M.dim();
  Mat K = -seg.M.sectional_curvature() * Mat::Identity(n, n);
  K(n - 1, n - 1) = 0.0;
  const double h = seg.step();

  Fundamental F;
  F.A.reserve(seg.samples + 1);
  F.Ap.reserve(seg.samples + 1);
  F.B.reserve(seg.samples + 1);
  F.Bp.reserve(seg.samples + 1);

  Mat PA = Mat::Identity(n, n), PAp = Mat::Zero(n, n);
  Mat PB = Mat::Zero(n, n), PBp = Mat::Identity(n, n);
  F.A.push_back(PA);
  F.Ap.push_back(PAp);
  F.B.push_back(PB);
  F.Bp.push_back(PBp);
  for (int p = 0; p < seg.samples; ++p) {
    rk4_step(PA, PAp, h, K);
    rk4_step(PB, PBp, h, K);
    F.A.push_back(PA);
    F.Ap.push_back(PAp);
    F.B.push_back(PB);
    F.Bp.push_back(PBp);
  }
  return F;
}

JacobiField assemble(const GeodesicSegment& seg, const Fundamental& F,
                     const Vec& a, const Vec& b) {
  JacobiField out;
  out.seg = seg;
  out.J.resize(seg.samples + 1, seg.M.dim());
  out.Jp.resize(seg.samples + 1, seg.M.dim());
  for (int p = 0; p <= seg.samples; ++p) {
    out.J.row(p) = (F.A[p] * a + F.B[p] * b).transpose();
    out.Jp.row(p) = (F.Ap[p] * a + F.Bp[p] * b).transpose();
  }
  return out;
}

Vec boundary_coefficient(const GeodesicSegment& seg, const Fundamental& F,
                         const Vec& a, const Vec& wc) {
  Eigen::FullPivLU<Mat> lu(F.B.back());
  if (!lu.isInvertible())
    throw ConjugatePoint("singular endpoint map at geodesic length " +
                         std::to_string(seg.length));
  return lu.solve(wc - F.A.back() * a);
}

double quadform_from(const GeodesicSegment& seg, const Fundamental& F,
                     const Vec& a, const Vec& b, const Vec& wc) {
  Vec jp0 = F.Ap.front() * a + F.Bp.front() * b;
  Vec jpl = F.Ap.back() * a + F.Bp.back() * b;
  return 2.0 * seg.length * (wc.dot(jpl) - a.dot(jp0));
}

}  // namespace

Vec GeodesicSegment::point_at(double s) const { return M.exp(x, s * v0); }

Mat GeodesicSegment::frame_at(double s) const {
  if (std::abs(s) < 1e-15) return frame0;
  Vec p = point_at(s);
  Mat F(frame0.rows(), frame0.cols());
  for (int j = 0; j < frame0.cols(); ++j)
    F.col(j) = M.transport(x, p, frame0.col(j));
  return F;
}

GeodesicSegment make_segment(const Manifold& M, const Vec& x, const Vec& y) {
  const double rho = M.distance(x, y);
  if (rho < kCoincident)
    throw ConfigError("geodesic segment endpoints coincide");
  if (rho > M.safe_radius() + 1e-12)
    throw StepTooLarge("geodesic length " + std::to_string(rho) +
                       " exceeds the safe radius " +
                       std::to_string(M.safe_radius()));

  GeodesicSegment seg;
  seg.M = M;
  seg.x = x;
  seg.y = y;
  seg.length = rho;
  seg.v0 = M.log(x, y) / rho;
  seg.samples = std::max(32, int(std::ceil(rho / 0.01)));

  const int n = M.dim();
  Mat basis = M.tangent_basis(x);
  seg.frame0.resize(M.ambient_dim(), n);
  int filled = 0;
  for (int j = 0; j < n && filled < n - 1; ++j) {
    Vec c = basis.col(j);
    c -= c.dot(seg.v0) * seg.v0;
    for (int i = 0; i < filled; ++i)
      c -= c.dot(seg.frame0.col(i)) * seg.frame0.col(i);
    const double nrm = c.norm();
    if (nrm > 1e-6) seg.frame0.col(filled++) = c / nrm;
  }
  if (filled != n - 1) throw Error("frame completion failed");
  seg.frame0.col(n - 1) = seg.v0;
  return seg;
}

double JacobiField::max_norm() const {
  double m = 0.0;
  for (int p = 0; p < J.rows(); ++p) m = std::max(m, J.row(p).norm());
  return m;
}

double JacobiField::ode_residual() const {
  const int P = int(J.rows()) - 1;
  const int n = int(J.cols());
  const double h = seg.step();
  const double kappa = seg.M.sectional_curvature();
  double worst = 0.0;
  for (int p = 2; p + 2 <= P; ++p) {
    for (int i = 0; i < n; ++i) {
      const double dd = (-J(p - 2, i) + 16.0 * J(p - 1, i) - 30.0 * J(p, i) +
                         16.0 * J(p + 1, i) - J(p + 2, i)) /
                        (12.0 * h * h);
      const double curv = (i == n - 1) ? 0.0 : kappa * J(p, i);
      worst = std::max(worst, std::abs(dd + curv));
    }
  }
  return worst;
}

Vec JacobiField::ambient_value(int p) const {
  return seg.frame_at(p * seg.step()) * J.row(p).transpose();
}

JacobiField integrate_jacobi(const GeodesicSegment& seg, const Vec& v,
                             const Vec& vp) {
  auto F = integrate_fundamental(seg);
  Vec a = seg.frame0.transpose() * v;
  Vec b = seg.frame0.transpose() * vp;
  return assemble(seg, F, a, b);
}

JacobiField boundary_jacobi(const GeodesicSegment& seg, const Vec& v,
                            const Vec& w) {
  auto F = integrate_fundamental(seg);
  Vec a = seg.frame0.transpose() * v;
  Vec wc = seg.frame_at(seg.length).transpose() * w;
  Vec b = boundary_coefficient(seg, F, a, wc);
  return assemble(seg, F, a, b);
}

double distance_hessian_quadform(const Manifold& M, const Vec& x, const Vec& y,
                                 const Vec& v, const Vec& w) {
  auto seg = make_segment(M, x, y);
  auto F = integrate_fundamental(seg);
  Vec a = seg.frame0.transpose() * v;
  Vec wc = seg.frame_at(seg.length).transpose() * w;
  Vec b = boundary_coefficient(seg, F, a, wc);
  return quadform_from(seg, F, a, b, wc);
}

DistanceHessian distance_hessian_matrix(const Manifold& M, const Vec& x,
                                        const Vec& y) {
  auto seg = make_segment(M, x, y);
  auto F = integrate_fundamental(seg);
  const int n = M.dim();
  Eigen::FullPivLU<Mat> lu(F.B.back());
  if (!lu.isInvertible())
    throw ConjugatePoint("singular endpoint map at geodesic length " +
                         std::to_string(seg.length));

  auto quad = [&](const Vec& a, const Vec& wc) {
    Vec b = lu.solve(wc - F.A.back() * a);
    return quadform_from(seg, F, a, b, wc);
  };
  // basis directions are the frame columns themselves, so their components
  // are coordinate unit vectors
  auto unit = [&](int i) {
    std::pair<Vec, Vec> d{Vec::Zero(n), Vec::Zero(n)};
    if (i < n)
      d.first[i] = 1.0;
    else
      d.second[i - n] = 1.0;
    return d;
  };

  DistanceHessian H;
  H.x = x;
  H.y = y;
  H.rho = seg.length;
  H.basis_x = seg.frame0;
  H.basis_y = seg.frame_at(seg.length);
  H.A = Mat::Zero(2 * n, 2 * n);
  for (int i = 0; i < 2 * n; ++i) {
    for (int j = i; j < 2 * n; ++j) {
      auto [ai, wi] = unit(i);
      auto [aj, wj] = unit(j);
      const double qp = quad(ai + aj, wi + wj);
      const double qm = quad(ai - aj, wi - wj);
      H.A(i, j) = H.A(j, i) = 0.25 * (qp - qm);
    }
  }
  return H;
}

Mat hessian_flat_limit(int n) {
  Mat L = Mat::Identity(2 * n, 2 * n);
  L.block(0, n, n, n) = -Mat::Identity(n, n);
  L.block(n, 0, n, n) = -Mat::Identity(n, n);
  return L;
}

CertifyReport certify_estimates(const Manifold& M, const Vec& x, const Vec& y,
                                int n_samples, std::uint64_t seed) {
  auto seg = make_segment(M, x, y);
  auto F = integrate_fundamental(seg);
  Eigen::FullPivLU<Mat> lu(F.B.back());
  if (!lu.isInvertible())
    throw ConjugatePoint("singular endpoint map at geodesic length " +
                         std::to_string(seg.length));
  Mat frame_l = seg.frame_at(seg.length);
  const double h = seg.step();

  CertifyReport rep;
  rep.rho = seg.length;
  rep.n_samples = n_samples;
  rep.min_j1_ratio = std::numeric_limits<double>::infinity();
  rep.max_j1_ratio = 0.0;

  for (int k = 0; k < n_samples; ++k) {
    // unit test vectors: denominators (||v||+||w||)^2 reduce to 4
    Vec v = M.sample_tangent(x, seed, 2 * k).normalized();
    Vec w = M.sample_tangent(y, seed, 2 * k + 1).normalized();
    Vec a = seg.frame0.transpose() * v;
    Vec wc = frame_l.transpose() * w;
    Vec b = lu.solve(wc - F.A.back() * a);
    auto Jf = assemble(seg, F, a, b);

    const double A = quadform_from(seg, F, a, b, wc);
    const double cmp = 2.0 * (w - M.transport(x, y, v)).squaredNorm();
    rep.max_transport_deviation =
        std::max(rep.max_transport_deviation,
                 std::abs(A - cmp) / (4.0 * rep.rho * rep.rho));
    rep.max_ode_residual = std::max(rep.max_ode_residual, Jf.ode_residual());
    rep.max_boundary_ratio =
        std::max(rep.max_boundary_ratio, Jf.max_norm() / 2.0);

    // geodesic-deviation ratio ||J(t)|| / t for J(0) = 0, J'(0) = v
    auto J1 = assemble(seg, F, Vec::Zero(M.dim()), a);
    for (int p = 1; p <= seg.samples; ++p) {
      const double ratio = J1.J.row(p).norm() / (p * h);
      rep.min_j1_ratio = std::min(rep.min_j1_ratio, ratio);
      rep.max_j1_ratio = std::max(rep.max_j1_ratio, ratio);
    }
  }

  auto H = distance_hessian_matrix(M, x, y);
  Mat R = H.A * H.A - 4.0 * H.A;
  rep.max_entry_A2_minus_4A = R.cwiseAbs().maxCoeff();
  rep.max_entry_A2_minus_4A_over_rho2 =
      rep.max_entry_A2_minus_4A / (rep.rho * rep.rho);
  return rep;
}

}  // namespace manoc
