#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "manoc/fields.hpp"
#include "manoc/problems.hpp"

#include <cmath>

using namespace manoc;

namespace {

Vec vec2(double a, double b) {
  Vec v(2);
  v[0] = a;
  v[1] = b;
  return v;
}
Vec vec3(double a, double b, double c) {
  Vec v(3);
  v[0] = a;
  v[1] = b;
  v[2] = c;
  return v;
}
CtrlVec ctrl1(double a) {
  CtrlVec u(1);
  u[0] = a;
  return u;
}

ControlledDynamics zero_problem(const Manifold& M) {
  ControlledDynamics dyn;
  dyn.model = M;
  dyn.num_diffusion = 1;
  dyn.drift = [](double, const Vec& x, const CtrlVec&) -> Vec {
    return Vec::Zero(x.size());
  };
  dyn.diffusion = {[](double, const Vec& x, const CtrlVec&) -> Vec {
    return Vec::Zero(x.size());
  }};
  dyn.running_cost = [](double, const Vec&, const CtrlVec&) { return 0.0; };
  dyn.terminal_cost = [](const Vec&) { return 0.0; };
  return dyn;
}

}  // namespace

TEST_CASE("control sets") {
  auto u3 = ControlSet::box_grid(CtrlVec::Constant(1, -1.0),
                                 CtrlVec::Constant(1, 1.0), {3});
  REQUIRE(u3.size() == 3);
  CHECK(u3.points[0][0] == doctest::Approx(-1.0));
  CHECK(u3.points[1][0] == doctest::Approx(0.0));
  CHECK(u3.points[2][0] == doctest::Approx(1.0));

  auto grid = ControlSet::box_grid(CtrlVec::Constant(2, -1.0),
                                   CtrlVec::Constant(2, 1.0), {3, 2});
  CHECK(grid.size() == 6);
  CHECK(grid.dim == 2);

  auto s = ControlSet::singleton();
  CHECK(s.size() == 1);

  CHECK_THROWS_AS(ControlSet::finite({}), ConfigError);
}

TEST_CASE("control signals") {
  auto c = ControlSignal::constant(ctrl1(0.5));
  CHECK(c(0.3, vec2(1, 0))[0] == doctest::Approx(0.5));
  CHECK_FALSE(c.is_feedback());

  // left-continuous piecewise-constant: u = values[j] on [breaks[j], breaks[j+1])
  auto pw = ControlSignal::piecewise({0.0, 0.1, 0.2}, {ctrl1(-1), ctrl1(2)});
  CHECK(pw(0.0, vec2(1, 0))[0] == doctest::Approx(-1));
  CHECK(pw(0.0999, vec2(1, 0))[0] == doctest::Approx(-1));
  CHECK(pw(0.1, vec2(1, 0))[0] == doctest::Approx(2));
  CHECK(pw(5.0, vec2(1, 0))[0] == doctest::Approx(2));   // clamped past T
  CHECK(pw(-1.0, vec2(1, 0))[0] == doctest::Approx(-1)); // clamped before t0

  auto fb = ControlSignal::feedback(
      [](double t, const Vec& x) { return ctrl1(t + x[0]); });
  CHECK(fb.is_feedback());
  CHECK(fb(0.25, vec2(1, 0))[0] == doctest::Approx(1.25));
}

TEST_CASE("eval_dynamics") {
  auto M = Manifold::sphere2();
  auto dyn = zero_problem(M);
  auto vals = eval_dynamics(dyn, 0.0, vec3(0, 0, 1), CtrlVec());
  CHECK(vals.drift.norm() == doctest::Approx(0.0));
  CHECK(vals.diffusion[0].norm() == doctest::Approx(0.0));
  CHECK(vals.running_cost == doctest::Approx(0.0));

  // circle steering: u = -1 at theta = 0 gives ambient drift (0,-1)
  auto p1 = make_problem("circle-steering");
  auto v1 = eval_dynamics(p1.dyn, 0.0, vec2(1, 0), ctrl1(-1.0));
  CHECK((v1.drift - vec2(0, -1)).norm() < 1e-15);

  // sphere projection frame at (1,0,0)
  auto p2 = make_problem("sphere2-bm");
  auto v2 = eval_dynamics(p2.dyn, 0.0, vec3(1, 0, 0), CtrlVec());
  CHECK(v2.diffusion[0].norm() == doctest::Approx(0.0));
  CHECK((v2.diffusion[1] - vec3(0, 1, 0)).norm() < 1e-15);
  CHECK((v2.diffusion[2] - vec3(0, 0, 1)).norm() < 1e-15);

  // a radial (non-tangent) field must be rejected
  ControlledDynamics bad = zero_problem(M);
  bad.drift = [](double, const Vec& x, const CtrlVec&) -> Vec { return x; };
  CHECK_THROWS_AS(eval_dynamics(bad, 0.0, vec3(0, 0, 1), CtrlVec()),
                  NonTangentField);
}

TEST_CASE("cutoff function") {
  ExtensionConfig cfg{0.5};
  CHECK(cfg.cutoff(0.0) == doctest::Approx(1.0));
  CHECK(cfg.cutoff(0.25) == doctest::Approx(0.0));
  CHECK(cfg.cutoff(0.3) == doctest::Approx(0.0));
  CHECK(cfg.cutoff(0.09) == doctest::Approx(0.4096));
  for (double s = 0; s <= 0.4; s += 0.01) {
    CHECK(cfg.cutoff(s) <= 1.0);
    CHECK(cfg.cutoff(s) >= 0.0);
  }
}

TEST_CASE("extension restriction and support") {
  auto M = Manifold::sphere2();
  ExtensionConfig cfg{0.5};
  TimeField X = [](double, const Vec& x, const CtrlVec&) -> Vec {
    Vec e3 = Vec::Zero(3);
    e3[2] = 1.0;
    return Vec(e3 - x[2] * x);
  };

  // restriction to M equals the field, sampled
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    Vec x = M.sample_point(42, i);
    worst = std::max(
        worst,
        (extend_field(M, cfg, X, 0.0, x, CtrlVec()) - X(0.0, x, CtrlVec()))
            .norm());
  }
  CHECK(worst <= 1e-12);

  // frozen value: z = 1.3*(1,0,0), dist = 0.3, lambda = 0.4096
  Vec z = vec3(1.3, 0, 0);
  Vec expect = 0.4096 * X(0.0, vec3(1, 0, 0), CtrlVec());
  CHECK((extend_field(M, cfg, X, 0.0, z, CtrlVec()) - expect).norm() < 1e-12);

  // compact support: zero at and beyond the cutoff tube
  CHECK(extend_field(M, cfg, X, 0.0, vec3(1.5, 0, 0), CtrlVec()).norm() ==
        doctest::Approx(0.0));
  CHECK(extend_field(M, cfg, X, 0.0, vec3(4, 2, 1), CtrlVec()).norm() ==
        doctest::Approx(0.0));
  // ... including at the focal center, where projection is undefined
  CHECK(extend_field(M, cfg, X, 0.0, vec3(0, 0, 0), CtrlVec()).norm() ==
        doctest::Approx(0.0));
}

TEST_CASE("drift bound on the squared distance along extensions") {
  // |<grad dist^2(z), Xbar(z)>| <= C * dist^2(z): tangent extensions never
  // push along the normal direction (exactly zero for these embeddings).
  auto M = Manifold::sphere2();
  ExtensionConfig cfg = ExtensionConfig::for_model(M);
  auto p2 = make_problem("sphere2-bm");
  double worst_ratio = 0;
  for (int i = 0; i < 400; ++i) {
    Vec x = M.sample_point(77, i);
    double d = 0.01 + 0.4 * rng::uniform(78, i, 0, 0);
    Vec z = (1.0 + d) * x;
    double s2 = M.dist2_to_manifold(z);
    Vec grad = 2.0 * (z - M.project(z));
    for (int k = 0; k < 3; ++k) {
      Vec xb = extend_field(M, cfg, p2.dyn.diffusion[k], 0.0, z, CtrlVec());
      worst_ratio = std::max(worst_ratio, std::abs(grad.dot(xb)) / s2);
    }
  }
  CHECK(worst_ratio <= 1.0);
}

TEST_CASE("stratonovich correction closed forms") {
  auto M = Manifold::sphere2();
  ExtensionConfig cfg = ExtensionConfig::for_model(M);

  // sigma = 0: corrected drift is b exactly
  auto p1 = make_problem("circle-steering");
  ExtensionConfig cfg1 = ExtensionConfig::for_model(p1.dyn.model);
  Vec b = stratonovich_drift(p1.dyn, cfg1, 0.0, vec2(1, 0), ctrl1(0.7));
  CHECK((b - vec2(0, 0.7)).norm() < 1e-12);

  // sphere projection frame: ambient correction is purely radial (-x), so the
  // tangential corrected drift equals b = 0 ...
  auto p2 = make_problem("sphere2-bm");
  for (int i = 0; i < 50; ++i) {
    Vec x = M.sample_point(55, i);
    Vec sd = stratonovich_drift(p2.dyn, cfg, 0.0, x, CtrlVec());
    CHECK(sd.norm() < 1e-10);
    // ... while the Ito drift keeps the radial part: b + (1/2)(-2x) = -x
    Vec id = ito_drift(p2.dyn, cfg, 0.0, x, CtrlVec());
    CHECK((id + x).norm() < 1e-10);
  }

  // circle with sigma = c*e_theta: D_sigma sigma = -c^2 x before projection
  auto p4 = make_problem("circle-diffusive");
  ExtensionConfig cfg4 = ExtensionConfig::for_model(p4.dyn.model);
  Vec x = p4.dyn.model.sample_point(66, 0);
  Vec sd = stratonovich_drift(p4.dyn, cfg4, 0.0, x, ctrl1(0.0));
  CHECK(sd.norm() < 1e-12);
  Vec id = ito_drift(p4.dyn, cfg4, 0.0, x, ctrl1(0.0));
  CHECK((id + 0.5 * 0.25 * x).norm() < 1e-12);
}

TEST_CASE("finite differences agree with closed forms") {
  auto p2 = make_problem("sphere2-bm");
  auto M = p2.dyn.model;
  ExtensionConfig cfg = ExtensionConfig::for_model(M);

  ControlledDynamics fd_dyn = p2.dyn;
  fd_dyn.diffusion_deriv.clear();  // force the finite-difference path

  for (int i = 0; i < 30; ++i) {
    Vec x = M.sample_point(91, i);
    Vec a = stratonovich_drift(p2.dyn, cfg, 0.0, x, CtrlVec());
    Vec bfd = stratonovich_drift(fd_dyn, cfg, 0.0, x, CtrlVec());
    CHECK((a - bfd).norm() < 1e-8);
    Vec ia = ito_drift(p2.dyn, cfg, 0.0, x, CtrlVec());
    Vec ifd = ito_drift(fd_dyn, cfg, 0.0, x, CtrlVec());
    CHECK((ia - ifd).norm() < 1e-8);
  }
}

TEST_CASE("covariant derivative") {
  auto M = Manifold::sphere2();
  ExtensionConfig cfg = ExtensionConfig::for_model(M);
  TimeField X = [](double, const Vec& x, const CtrlVec&) -> Vec {
    Vec e3 = Vec::Zero(3);
    e3[2] = 1.0;
    return Vec(e3 - x[2] * x);
  };

  // worked example: X = P(e3), x = (1,0,0), v = (0,0,1): tangential part 0
  Vec d = covariant_derivative(M, cfg, X, 0.0, vec3(1, 0, 0), CtrlVec(),
                               vec3(0, 0, 1));
  CHECK(d.norm() < 1e-8);

  // parallel (constant-speed) field on the circle: covariant derivative 0
  auto C = Manifold::circle();
  ExtensionConfig ccfg = ExtensionConfig::for_model(C);
  TimeField par = [](double, const Vec& x, const CtrlVec&) -> Vec {
    return 0.8 * vec2(-x[1], x[0]);
  };
  Vec x = C.sample_point(13, 3);
  Vec tangent = C.tangent_basis(x).col(0);
  CHECK(covariant_derivative(C, ccfg, par, 0.0, x, CtrlVec(), tangent).norm() <
        1e-8);

  // linearity in v within finite-difference tolerance
  Vec xs = M.sample_point(14, 5);
  Vec v = M.sample_tangent(xs, 15, 5);
  Vec d1 = covariant_derivative(M, cfg, X, 0.0, xs, CtrlVec(), v);
  Vec d2 = covariant_derivative(M, cfg, X, 0.0, xs, CtrlVec(), Vec(2.0 * v));
  CHECK((d2 - 2.0 * d1).norm() < 1e-6 * std::max(1.0, d1.norm()));

  // closed form equals the finite-difference value
  auto p2 = make_problem("sphere2-bm");
  for (int i = 0; i < 20; ++i) {
    Vec y = M.sample_point(16, i);
    Vec w = M.sample_tangent(y, 17, i);
    Vec cfd = covariant_derivative(M, cfg, p2.dyn.diffusion[2], 0.0, y,
                                   CtrlVec(), w);
    Vec ccl = covariant_derivative(M, cfg, p2.dyn.diffusion[2], 0.0, y,
                                   CtrlVec(), w, &p2.dyn.diffusion_deriv[2]);
    CHECK((cfd - ccl).norm() < 1e-8 * std::max(1.0, ccl.norm()));
  }
}

TEST_CASE("normal remainder matches the second fundamental form") {
  // on the unit sphere h(v,w) = -<v,w> x; finite differences on the extension
  // must reproduce it
  auto M = Manifold::sphere2();
  ExtensionConfig cfg = ExtensionConfig::for_model(M);
  auto p2 = make_problem("sphere2-bm");
  for (int i = 0; i < 40; ++i) {
    Vec x = M.sample_point(19, i);
    Vec v = M.sample_tangent(x, 20, i);
    for (int k = 0; k < 3; ++k) {
      Vec amb = ambient_derivative(M, cfg, p2.dyn.diffusion[k], 0.0, x,
                                   CtrlVec(), v);
      Vec normal = amb - M.tangent_project(x, amb);
      Vec sigma = p2.dyn.diffusion[k](0.0, x, CtrlVec());
      Vec expected = -v.dot(sigma) * x;
      CHECK((normal - expected).norm() <= 1e-6 * std::max(1.0, expected.norm()));
    }
  }
}

TEST_CASE("transported field difference is Lipschitz in distance") {
  // ||L_{yx} X(y) - X(x)|| / rho <= max_{|v|=1} ||D_v X|| + margin
  auto M = Manifold::sphere2();
  auto p2 = make_problem("sphere2-bm");
  const auto& X = p2.dyn.diffusion[2];  // P(e3)
  double worst = 0;
  for (int i = 0; i < 400; ++i) {
    Vec x = M.sample_point(29, 2 * i);
    Vec dir = M.sample_tangent(x, 30, i);
    double rho = 0.01 + 0.49 * rng::uniform(31, i, 0, 0);
    Vec y = M.exp(x, (rho / dir.norm()) * dir);
    Vec diff = M.transport(y, x, X(0.0, y, CtrlVec())) - X(0.0, x, CtrlVec());
    worst = std::max(worst, diff.norm() / rho);
  }
  // sup ||D_v X|| over unit tangents is 1 for the P(e3) field
  CHECK(worst <= 1.0 + 0.1);
}

TEST_CASE("problem catalog bounds") {
  // sampled sup of ||b|| + sum||sigma_i|| + |f| stays within C_B, and the
  // control-Lipschitz ratio within C_L
  for (const auto& info : list_problems()) {
    Problem p = make_problem(info.name);
    const auto& M = p.dyn.model;
    double worst = 0;
    for (int i = 0; i < 200; ++i) {
      Vec x = M.sample_point(37, i);
      for (const auto& u : p.controls.points) {
        auto vals = eval_dynamics(p.dyn, 0.0, x, u);
        double total = vals.drift.norm() + std::abs(vals.running_cost);
        for (const auto& s : vals.diffusion) total += s.norm();
        worst = std::max(worst, total);
      }
    }
    CAPTURE(info.name);
    CHECK(worst <= p.dyn.field_bound + 1e-9);
  }
}
