#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "manoc/geometry.hpp"

#include <cmath>
#include <vector>

using namespace manoc;

namespace {

Vec make_vec(std::initializer_list<double> xs) {
  Vec v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

Vec circle_point(double theta) { return make_vec({std::cos(theta), std::sin(theta)}); }

std::vector<Manifold> all_models() {
  return {Manifold::circle(), Manifold::sphere2(), Manifold::torus2(),
          Manifold::sphere3()};
}

}  // namespace

TEST_CASE("model constants") {
  auto s2 = Manifold::sphere2();
  CHECK(s2.ambient_dim() == 3);
  CHECK(s2.dim() == 2);
  CHECK(s2.injectivity_radius() == doctest::Approx(M_PI));
  CHECK(s2.curvature_bound() == doctest::Approx(1.0));
  CHECK(s2.tubular_radius() == doctest::Approx(0.9));
  // r_m = min{pi/2, 1/sqrt(2), 1}
  CHECK(s2.safe_radius() == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(s2.on_manifold_tol() == doctest::Approx(1e-9));

  auto c = Manifold::circle();
  CHECK(c.ambient_dim() == 2);
  CHECK(c.dim() == 1);
  CHECK(c.injectivity_radius() == doctest::Approx(M_PI));
  CHECK(c.curvature_bound() == doctest::Approx(0.0));
  CHECK(c.tubular_radius() == doctest::Approx(0.9));
  CHECK(c.safe_radius() == doctest::Approx(1.0 / std::sqrt(2.0)));

  auto t2 = Manifold::torus2();
  CHECK(t2.ambient_dim() == 4);
  CHECK(t2.dim() == 2);
  CHECK(t2.injectivity_radius() == doctest::Approx(M_PI / std::sqrt(2.0)));
  CHECK(t2.curvature_bound() == doctest::Approx(0.0));

  auto s3 = Manifold::sphere3();
  CHECK(s3.ambient_dim() == 4);
  CHECK(s3.dim() == 3);
  CHECK(s3.injectivity_radius() == doctest::Approx(M_PI));

  CHECK(Manifold::by_name("sphere2").name() == "sphere2");
  CHECK_THROWS_AS(Manifold::by_name("klein"), ConfigError);
}

TEST_CASE("projection") {
  auto s2 = Manifold::sphere2();
  CHECK((s2.project(make_vec({2, 0, 0})) - make_vec({1, 0, 0})).norm() < 1e-15);
  auto c = Manifold::circle();
  const double r = std::sqrt(2.0) / 2.0;
  CHECK((c.project(make_vec({0.5, 0.5})) - make_vec({r, r})).norm() < 1e-15);
  CHECK_THROWS_AS(s2.project(make_vec({0, 0, 0})), OutsideTubularNeighborhood);

  // torus2: per-factor radial projection, undefined on a factor axis
  auto t2 = Manifold::torus2();
  Vec z = make_vec({1, 0, 0, 1});
  Vec p = t2.project(z);
  CHECK(t2.on_manifold(p));
  CHECK(t2.dist2_to_manifold(p) < 1e-20);
  CHECK_THROWS_AS(t2.project(make_vec({0, 0, 0, 1})), OutsideTubularNeighborhood);

  CHECK(s2.dist2_to_manifold(make_vec({1.3, 0, 0})) == doctest::Approx(0.09));
}

TEST_CASE("tangent projection") {
  auto s2 = Manifold::sphere2();
  CHECK((s2.tangent_project(make_vec({1, 0, 0}), make_vec({1, 1, 0})) -
         make_vec({0, 1, 0}))
            .norm() < 1e-15);
  CHECK((s2.tangent_project(make_vec({1, 0, 0}), make_vec({0, 0, 1})) -
         make_vec({0, 0, 1}))
            .norm() < 1e-15);
  auto c = Manifold::circle();
  CHECK((c.tangent_project(make_vec({0, 1}), make_vec({3, 5})) -
         make_vec({3, 0}))
            .norm() < 1e-15);
  // idempotence on random inputs, all models
  for (const auto& M : all_models()) {
    for (int i = 0; i < 50; ++i) {
      Vec x = M.sample_point(7, i);
      Vec v(M.ambient_dim());
      for (int d = 0; d < M.ambient_dim(); ++d)
        v[d] = rng::normal(11, i, 0, d);
      Vec p1 = M.tangent_project(x, v);
      Vec p2 = M.tangent_project(x, p1);
      CHECK((p1 - p2).norm() < 1e-13);
    }
  }
}

TEST_CASE("exp map closed forms") {
  auto s2 = Manifold::sphere2();
  Vec y = s2.exp(make_vec({1, 0, 0}), make_vec({0, M_PI / 2, 0}));
  CHECK((y - make_vec({0, 1, 0})).norm() < 1e-14);

  for (const auto& M : all_models()) {
    Vec x = M.sample_point(3, 1);
    CHECK((M.exp(x, Vec::Zero(M.ambient_dim())) - x).norm() < 1e-15);
  }

  // circle arc length: rotation by signed tangent component
  auto c = Manifold::circle();
  double theta0 = 0.4, s = 1.1;
  Vec x = circle_point(theta0);
  Vec v = s * make_vec({-std::sin(theta0), std::cos(theta0)});
  CHECK((c.exp(x, v) - circle_point(theta0 + s)).norm() < 1e-14);

  bool beyond = false;
  c.exp(x, (M_PI + 0.1) * make_vec({-std::sin(theta0), std::cos(theta0)}),
        &beyond);
  CHECK(beyond);
  beyond = true;
  c.exp(x, v, &beyond);
  CHECK_FALSE(beyond);
}

TEST_CASE("log map closed forms") {
  auto s2 = Manifold::sphere2();
  Vec v = s2.log(make_vec({1, 0, 0}), make_vec({0, 1, 0}));
  CHECK((v - make_vec({0, M_PI / 2, 0})).norm() < 1e-14);
  Vec z = s2.log(make_vec({1, 0, 0}), make_vec({1, 0, 0}));
  CHECK(z.norm() == doctest::Approx(0.0));
  CHECK_THROWS_AS(s2.log(make_vec({1, 0, 0}), make_vec({-1, 0, 0})), CutLocus);
  CHECK_THROWS_AS(
      Manifold::circle().log(circle_point(0.0), circle_point(M_PI)), CutLocus);
}

TEST_CASE("distance closed forms") {
  auto s2 = Manifold::sphere2();
  CHECK(s2.distance(make_vec({1, 0, 0}), make_vec({0, 1, 0})) ==
        doctest::Approx(M_PI / 2));
  // antipodal distance is defined (only log errors there)
  CHECK(s2.distance(make_vec({1, 0, 0}), make_vec({-1, 0, 0})) ==
        doctest::Approx(M_PI));
  auto c = Manifold::circle();
  CHECK(c.distance(circle_point(0.1), circle_point(6.2)) ==
        doctest::Approx(2 * M_PI - 6.1));
  // torus2 wraps each factor independently
  auto t2 = Manifold::torus2();
  const double R = 1.0 / std::sqrt(2.0);
  Vec a = make_vec({R, 0, R, 0});
  Vec b = make_vec({R * std::cos(0.3), R * std::sin(0.3), R * std::cos(-0.4),
                    R * std::sin(-0.4)});
  CHECK(t2.distance(a, b) == doctest::Approx(R * std::hypot(0.3, 0.4)));
}

TEST_CASE("parallel transport closed forms") {
  auto s2 = Manifold::sphere2();
  Vec x = make_vec({1, 0, 0}), y = make_vec({0, 1, 0});
  CHECK((s2.transport(x, y, make_vec({0, 0, 1})) - make_vec({0, 0, 1})).norm() <
        1e-14);
  CHECK((s2.transport(x, y, make_vec({0, 1, 0})) - make_vec({-1, 0, 0})).norm() <
        1e-14);
  // x == y returns v
  CHECK((s2.transport(x, x, make_vec({0, 0.3, -0.2})) -
         make_vec({0, 0.3, -0.2}))
            .norm() < 1e-15);
  // circle: component along unit tangent is preserved
  auto c = Manifold::circle();
  Vec cx = circle_point(0.2), cy = circle_point(2.1);
  Vec cv = 0.7 * make_vec({-std::sin(0.2), std::cos(0.2)});
  Vec cw = c.transport(cx, cy, cv);
  CHECK((cw - 0.7 * make_vec({-std::sin(2.1), std::cos(2.1)})).norm() < 1e-14);
}

TEST_CASE("grad of squared distance") {
  auto s2 = Manifold::sphere2();
  auto [gx, gy] = s2.grad_dist2(make_vec({1, 0, 0}), make_vec({0, 1, 0}));
  CHECK((gx - make_vec({0, -M_PI, 0})).norm() < 1e-13);
  CHECK((gy - make_vec({-M_PI, 0, 0})).norm() < 1e-13);

  auto c = Manifold::circle();
  auto [cgx, cgy] = c.grad_dist2(circle_point(0.0), circle_point(0.3));
  CHECK((cgx - (-0.6) * make_vec({0, 1})).norm() < 1e-13);

  // central-difference oracle: d/ds rho^2(exp_x(s v), y) at s=0 equals <g_x, v>
  for (const auto& M : all_models()) {
    const double h = 1e-5;
    for (int i = 0; i < 60; ++i) {
      Vec x = M.sample_point(21, 2 * i);
      Vec y = M.sample_point(21, 2 * i + 1);
      double rho = M.distance(x, y);
      if (rho < 0.1 || rho > 0.9 * M.injectivity_radius()) continue;
      Vec v = M.sample_tangent(x, 23, i);
      v /= v.norm();
      auto [gx2, gy2] = M.grad_dist2(x, y);
      double dplus = M.distance(M.exp(x, h * v), y);
      double dminus = M.distance(M.exp(x, -h * v), y);
      double fd = (dplus * dplus - dminus * dminus) / (2 * h);
      double an = gx2.dot(v);
      CHECK(std::abs(fd - an) <= 1e-5 * std::max(1.0, std::abs(an)));
    }
  }
}

TEST_CASE("roundtrip, isometry, reversal over samples") {
  for (const auto& M : all_models()) {
    const double imax = 0.9 * M.injectivity_radius();
    double worst_rt = 0, worst_rho = 0, worst_iso = 0, worst_rev = 0;
    for (int i = 0; i < 2000; ++i) {
      Vec x = M.sample_point(101, i);
      Vec dir = M.sample_tangent(x, 103, i);
      double n = dir.norm();
      if (n < 1e-12) continue;
      double len = (0.001 + 0.999 * rng::uniform(107, i, 0, 0)) * imax;
      Vec v = (len / n) * dir;

      Vec y = M.exp(x, v);
      CHECK(M.dist2_to_manifold(y) < 1e-18);
      worst_rho = std::max(worst_rho, std::abs(M.distance(x, y) - len));
      Vec back = M.log(x, y);
      worst_rt = std::max(worst_rt, (back - v).norm());

      Vec w = M.sample_tangent(x, 109, i);
      Vec Lw = M.transport(x, y, w);
      worst_iso = std::max(worst_iso, std::abs(Lw.norm() - w.norm()));
      // tangency of the transported vector at y
      CHECK((M.tangent_project(y, Lw) - Lw).norm() < 1e-12);

      Vec rev = M.transport(x, y, M.log(x, y)) + M.log(y, x);
      worst_rev = std::max(worst_rev, rev.norm());
    }
    CAPTURE(M.name());
    CHECK(worst_rt <= 1e-8);
    CHECK(worst_rho <= 1e-10);
    CHECK(worst_iso <= 1e-10);
    CHECK(worst_rev <= 1e-10);
  }
}

TEST_CASE("transport linearity") {
  auto s3 = Manifold::sphere3();
  Vec x = s3.sample_point(5, 0);
  Vec y = s3.sample_point(5, 1);
  Vec a = s3.sample_tangent(x, 6, 0);
  Vec b = s3.sample_tangent(x, 6, 1);
  Vec lhs = s3.transport(x, y, 2.0 * a - 0.5 * b);
  Vec rhs = 2.0 * s3.transport(x, y, a) - 0.5 * s3.transport(x, y, b);
  CHECK((lhs - rhs).norm() < 1e-12);
}

TEST_CASE("distance equivalence against the chord") {
  // chord <= rho <= C_rho * chord, with C_rho = pi/2 exactly on sphere2
  auto s2 = Manifold::sphere2();
  double worst_ratio = 0;
  for (int i = 0; i < 2000; ++i) {
    Vec x = s2.sample_point(301, 2 * i);
    Vec y = s2.sample_point(301, 2 * i + 1);
    double chord = (x - y).norm();
    if (chord < 1e-8) continue;
    double rho = s2.distance(x, y);
    CHECK(chord <= rho + 1e-12);
    worst_ratio = std::max(worst_ratio, rho / chord);
  }
  CHECK(worst_ratio <= M_PI / 2 + 1e-9);
}

TEST_CASE("triangle inequality sampled") {
  for (const auto& M : all_models()) {
    for (int i = 0; i < 300; ++i) {
      Vec a = M.sample_point(401, 3 * i);
      Vec b = M.sample_point(401, 3 * i + 1);
      Vec c = M.sample_point(401, 3 * i + 2);
      CHECK(M.distance(a, c) <= M.distance(a, b) + M.distance(b, c) + 1e-12);
    }
    Vec a = M.sample_point(402, 0);
    CHECK(M.distance(a, a) == doctest::Approx(0.0));
  }
}

TEST_CASE("projection single-valued inside the tube") {
  // move along the outward normal by |delta| < eps_M and project back
  auto s2 = Manifold::sphere2();
  for (int i = 0; i < 200; ++i) {
    Vec x = s2.sample_point(501, i);
    double delta = (2 * rng::uniform(503, i, 0, 0) - 1) * 0.89;
    Vec z = (1.0 + delta) * x;
    CHECK((s2.project(z) - x).norm() < 1e-12);
  }
}

TEST_CASE("tangent basis orthonormal") {
  for (const auto& M : all_models()) {
    Vec x = M.sample_point(601, 4);
    Mat B = M.tangent_basis(x);
    CHECK(B.rows() == M.ambient_dim());
    CHECK(B.cols() == M.dim());
    Mat G = B.transpose() * B;
    CHECK((G - Mat::Identity(M.dim(), M.dim())).norm() < 1e-12);
    for (int j = 0; j < B.cols(); ++j) {
      Vec col = B.col(j);
      CHECK((M.tangent_project(x, col) - col).norm() < 1e-12);
    }
  }
}
