#include "manoc/problems.hpp"

#include <cmath>

namespace manoc {

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

// Unit tangent of S^1 at x (counterclockwise).
Vec circle_tangent(const Vec& x) { return vec2(-x[1], x[0]); }

// sigma_i(x) = P_x(e_i) = e_i - <x,e_i> x, the sphere projection frame.
Vec sphere_frame(const Vec& x, int i) {
  Vec v = Vec::Zero(3);
  v[i] = 1.0;
  return Vec(v - x[i] * x);
}

// d/ds sigma_i(c(s))|0 along a curve in S^2 with velocity v at x.
Vec sphere_frame_deriv(const Vec& x, const Vec& v, int i) {
  return Vec(-v[i] * x - x[i] * v);
}

Problem circle_steering() {
  Problem p;
  p.name = "circle-steering";
  p.description =
      "deterministic steering on the circle: b = u*e_theta, f = 0, h = sin";
  p.dyn.model = Manifold::circle();
  p.dyn.num_diffusion = 0;
  p.dyn.drift = [](double, const Vec& x, const CtrlVec& u) -> Vec {
    return u[0] * circle_tangent(x);
  };
  p.dyn.running_cost = [](double, const Vec&, const CtrlVec&) { return 0.0; };
  p.dyn.terminal_cost = [](const Vec& x) { return x[1]; };  // sin(theta)
  p.dyn.field_bound = 1.0;
  p.dyn.field_lipschitz = 1.0;
  p.dyn.horizon = 0.2;
  CtrlVec u(1);
  u[0] = -1.0;
  CtrlVec z(1);
  z[0] = 0.0;
  CtrlVec w(1);
  w[0] = 1.0;
  p.controls = ControlSet::finite({u, z, w});
  p.controls.kind = ControlSet::Kind::Box;
  p.controls.box_lo = CtrlVec::Constant(1, -1.0);
  p.controls.box_hi = CtrlVec::Constant(1, 1.0);
  p.x0 = vec2(1.0, 0.0);
  return p;
}

Problem sphere2_bm() {
  Problem p;
  p.name = "sphere2-bm";
  p.description =
      "uncontrolled Brownian motion on the sphere, h = third coordinate";
  p.dyn.model = Manifold::sphere2();
  p.dyn.num_diffusion = 3;
  p.dyn.drift = [](double, const Vec& x, const CtrlVec&) -> Vec {
    return Vec::Zero(x.size());
  };
  for (int i = 0; i < 3; ++i) {
    p.dyn.diffusion.push_back(
        [i](double, const Vec& x, const CtrlVec&) { return sphere_frame(x, i); });
    p.dyn.diffusion_deriv.push_back(
        [i](double, const Vec& x, const CtrlVec&, const Vec& v) {
          return sphere_frame_deriv(x, v, i);
        });
  }
  p.dyn.running_cost = [](double, const Vec&, const CtrlVec&) { return 0.0; };
  p.dyn.terminal_cost = [](const Vec& x) { return x[2]; };
  p.dyn.field_bound = 2.5;  // sup sum_i ||sigma_i|| = sqrt(6) ~ 2.45
  p.dyn.field_lipschitz = 1.0;
  p.dyn.horizon = 1.0;
  p.controls = ControlSet::singleton();
  p.x0 = vec3(0.0, 0.0, 1.0);
  return p;
}

Problem sphere2_controlled() {
  Problem p;
  p.name = "sphere2-controlled";
  p.description =
      "controlled drift along P(e1) with control-scaled diffusion on the "
      "sphere";
  p.dyn.model = Manifold::sphere2();
  p.dyn.num_diffusion = 3;
  p.dyn.drift = [](double, const Vec& x, const CtrlVec& u) -> Vec {
    return u[0] * sphere_frame(x, 0);
  };
  for (int i = 0; i < 3; ++i) {
    p.dyn.diffusion.push_back(
        [i](double, const Vec& x, const CtrlVec& u) -> Vec {
          return (1.0 + 0.2 * u[1]) * sphere_frame(x, i);
        });
    p.dyn.diffusion_deriv.push_back(
        [i](double, const Vec& x, const CtrlVec& u, const Vec& v) -> Vec {
          return (1.0 + 0.2 * u[1]) * sphere_frame_deriv(x, v, i);
        });
  }
  p.dyn.running_cost = [](double, const Vec&, const CtrlVec& u) {
    return 0.5 * u.squaredNorm();
  };
  p.dyn.terminal_cost = [](const Vec& x) { return x[2]; };
  p.dyn.field_bound = 5.0;  // 1 + 1.2*sqrt(6) + 1, rounded up
  p.dyn.field_lipschitz = 2.0;
  p.dyn.horizon = 0.5;
  p.controls = ControlSet::box_grid(CtrlVec::Constant(2, -1.0),
                                    CtrlVec::Constant(2, 1.0), {3, 3});
  p.x0 = vec3(0.0, 0.0, 1.0);
  return p;
}

Problem circle_diffusive() {
  Problem p;
  const double c = 0.5;  // diffusion speed
  p.name = "circle-diffusive";
  p.description =
      "controlled drift with constant diffusion on the circle, quadratic "
      "control cost";
  p.dyn.model = Manifold::circle();
  p.dyn.num_diffusion = 1;
  p.dyn.drift = [](double, const Vec& x, const CtrlVec& u) -> Vec {
    return u[0] * circle_tangent(x);
  };
  p.dyn.diffusion.push_back([c](double, const Vec& x, const CtrlVec&) -> Vec {
    return c * circle_tangent(x);
  });
  p.dyn.diffusion_deriv.push_back(
      [c](double, const Vec&, const CtrlVec&, const Vec& v) -> Vec {
        // d/ds c*e_theta(c(s)) = c * (rotate velocity by +pi/2)
        Vec d(2);
        d[0] = -c * v[1];
        d[1] = c * v[0];
        return d;
      });
  p.dyn.running_cost = [](double, const Vec&, const CtrlVec& u) {
    return 0.25 * u[0] * u[0];
  };
  p.dyn.terminal_cost = [](const Vec& x) { return x[1]; };
  p.dyn.field_bound = 1.75;  // 1 + 0.5 + 0.25
  p.dyn.field_lipschitz = 1.0;
  p.dyn.horizon = 0.5;
  CtrlVec u(1);
  u[0] = -1.0;
  CtrlVec z(1);
  z[0] = 0.0;
  CtrlVec w(1);
  w[0] = 1.0;
  p.controls = ControlSet::finite({u, z, w});
  p.controls.kind = ControlSet::Kind::Box;
  p.controls.box_lo = CtrlVec::Constant(1, -1.0);
  p.controls.box_hi = CtrlVec::Constant(1, 1.0);
  p.x0 = vec2(1.0, 0.0);
  return p;
}

}  // namespace

Problem make_problem(const std::string& name) {
  if (name == "circle-steering") return circle_steering();
  if (name == "sphere2-bm") return sphere2_bm();
  if (name == "sphere2-controlled") return sphere2_controlled();
  if (name == "circle-diffusive") return circle_diffusive();
  throw ConfigError("unknown problem id: " + name);
}

std::vector<ProblemInfo> list_problems() {
  std::vector<ProblemInfo> out;
  for (const char* id : {"circle-steering", "sphere2-bm", "sphere2-controlled",
                         "circle-diffusive"}) {
    Problem p = make_problem(id);
    out.push_back({p.name, p.description});
  }
  return out;
}

}  // namespace manoc
