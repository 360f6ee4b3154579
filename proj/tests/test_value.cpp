#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "manoc/problems.hpp"
#include "manoc/value.hpp"

#include <cmath>

using namespace manoc;

namespace {

Vec vec2(double a, double b) {
  Vec v(2);
  v[0] = a;
  v[1] = b;
  return v;
}

Vec circle_point(double theta) { return vec2(std::cos(theta), std::sin(theta)); }

CtrlVec ctrl1(double a) {
  CtrlVec u(1);
  u[0] = a;
  return u;
}

// b = sigma = 0 on the sphere with running cost c and terminal cost x3
ControlledDynamics frozen_sphere(double c) {
  ControlledDynamics dyn;
  dyn.model = Manifold::sphere2();
  dyn.num_diffusion = 0;
  dyn.drift = [](double, const Vec& x, const CtrlVec&) -> Vec {
    return Vec::Zero(x.size());
  };
  dyn.running_cost = [c](double, const Vec&, const CtrlVec&) { return c; };
  dyn.terminal_cost = [](const Vec& x) { return x[2]; };
  dyn.horizon = 1.0;
  return dyn;
}

// min of sin over the angle interval [lo, hi] (hi - lo < 2*pi)
double min_sin_over(double lo, double hi) {
  double best = std::min(std::sin(lo), std::sin(hi));
  // interior critical points at -pi/2 + 2*pi*k
  const double k0 = std::ceil((lo + M_PI / 2) / (2 * M_PI));
  const double crit = -M_PI / 2 + 2 * M_PI * k0;
  if (crit >= lo && crit <= hi) best = -1.0;
  return best;
}

}  // namespace

TEST_CASE("path cost: left-endpoint quadrature plus terminal") {
  ControlledDynamics dyn = frozen_sphere(0.0);
  IntegratorConfig cfg;
  Vec pole = Vec::Zero(3);
  pole[2] = 1.0;
  ControlSignal u = ControlSignal::constant(CtrlVec::Zero(1));

  SUBCASE("f=0, h=0 gives exactly zero") {
    dyn.terminal_cost = [](const Vec&) { return 0.0; };
    cfg.dt = 0.3;  // ragged grid: 0.3, 0.3, 0.3, 0.1
    SamplePath path = simulate_path(dyn, cfg, 0.0, pole, u);
    CHECK(path_cost(dyn, path) == 0.0);
  }

  SUBCASE("f=1, h=0 over unit horizon sums to exactly one on a dyadic grid") {
    dyn.running_cost = [](double, const Vec&, const CtrlVec&) { return 1.0; };
    dyn.terminal_cost = [](const Vec&) { return 0.0; };
    cfg.dt = 0.25;
    SamplePath path = simulate_path(dyn, cfg, 0.0, pole, u);
    CHECK(path.times.size() == 5);
    CHECK(path_cost(dyn, path) == 1.0);
  }

  SUBCASE("f=1 on a ragged grid still telescopes to the horizon length") {
    dyn.running_cost = [](double, const Vec&, const CtrlVec&) { return 1.0; };
    dyn.terminal_cost = [](const Vec&) { return 0.0; };
    cfg.dt = 0.3;
    SamplePath path = simulate_path(dyn, cfg, 0.0, pole, u);
    CHECK(path.times.size() == 5);
    CHECK(path_cost(dyn, path) == doctest::Approx(1.0).epsilon(1e-14));
  }

  SUBCASE("f=0, h = third coordinate at the north pole gives exactly one") {
    cfg.dt = 0.5;
    SamplePath path = simulate_path(dyn, cfg, 0.0, pole, u);
    CHECK(path.states.back() == pole);  // frozen dynamics never move
    CHECK(path_cost(dyn, path) == 1.0);
  }
}

TEST_CASE("estimate_J: frozen dynamics are exact with zero spread") {
  ControlledDynamics dyn = frozen_sphere(0.5);
  IntegratorConfig cfg;
  cfg.dt = 0.25;
  Vec pole = Vec::Zero(3);
  pole[2] = 1.0;
  ControlSignal u = ControlSignal::constant(CtrlVec::Zero(1));

  ValueEstimate est = estimate_J(dyn, 0.0, pole, u, 16, cfg);
  // run = 4 * 0.25 * 0.5 = 0.5 and h = 1 exactly; all paths identical
  CHECK(est.mean == 1.5);
  CHECK(est.std_error == 0.0);
  CHECK(est.n_paths == 16);

  CHECK_THROWS_AS(estimate_J(dyn, 0.0, pole, u, 1, cfg), ConfigError);
}

TEST_CASE("estimate_J: deterministic steering matches the flow cost") {
  Problem p = make_problem("circle-steering");
  IntegratorConfig cfg;
  cfg.dt = 1e-3;
  ControlSignal u = ControlSignal::constant(ctrl1(1.0));

  ValueEstimate est = estimate_J(p.dyn, p.t0, p.x0, u, 8, cfg);
  CHECK(est.std_error == 0.0);  // no diffusion: every path is the same
  CHECK(est.mean == doctest::Approx(std::sin(0.2)).epsilon(1e-5));
}

TEST_CASE("estimate_J: spectral decay of the height under sphere BM") {
  Problem p = make_problem("sphere2-bm");
  IntegratorConfig cfg;
  cfg.dt = 2e-3;
  cfg.seed = 71;
  ControlSignal u = ControlSignal::constant(CtrlVec::Zero(1));

  ValueEstimate est = estimate_J(p.dyn, p.t0, p.x0, u, 4000, cfg);
  CHECK(est.std_error > 0.0);
  CHECK(est.std_error < 0.02);
  const double target = std::exp(-1.0);
  CHECK(std::abs(est.mean - target) < 3.0 * est.std_error + 2e-3);
}

TEST_CASE("brute force: single candidate reduces to estimate_J") {
  Problem p = make_problem("circle-diffusive");
  IntegratorConfig cfg;
  cfg.dt = 1e-2;
  cfg.seed = 5;
  CtrlVec half = ctrl1(0.5);
  ControlSet single = ControlSet::finite({half});

  BruteForceResult res = brute_force_value(p.dyn, p.t0, p.x0, 1, single, 64, cfg);
  ValueEstimate direct =
      estimate_J(p.dyn, p.t0, p.x0, ControlSignal::constant(half), 64, cfg);
  CHECK(res.estimate.mean == direct.mean);
  CHECK(res.estimate.std_error == direct.std_error);
  REQUIRE(res.choice.size() == 1);
  CHECK(res.choice[0] == 0);
  REQUIRE(res.breaks.size() == 2);
  CHECK(res.breaks[0] == p.t0);
  CHECK(res.breaks[1] == p.dyn.horizon);
}

TEST_CASE("brute force: deterministic steering picks full negative drive") {
  Problem p = make_problem("circle-steering");  // T = 0.2, h = sin(theta)
  IntegratorConfig cfg;
  cfg.dt = 1e-3;

  BruteForceResult res =
      brute_force_value(p.dyn, p.t0, p.x0, 2, p.controls, 2, cfg);
  REQUIRE(res.choice.size() == 2);
  CHECK(res.choice[0] == 0);  // points are {-1, 0, +1}
  CHECK(res.choice[1] == 0);
  CHECK(res.estimate.mean == doctest::Approx(std::sin(-0.2)).epsilon(1e-4));
  CHECK(res.estimate.std_error == 0.0);

  SUBCASE("the argmin signal replays to the same value") {
    ValueEstimate replay = estimate_J(p.dyn, p.t0, p.x0, res.control, 2, cfg);
    CHECK(replay.mean == res.estimate.mean);
  }
}

TEST_CASE("brute force: duplicated control points leave the value unchanged") {
  Problem p = make_problem("circle-diffusive");
  IntegratorConfig cfg;
  cfg.dt = 1e-2;
  cfg.seed = 9;

  BruteForceResult base =
      brute_force_value(p.dyn, p.t0, p.x0, 2, p.controls, 32, cfg);

  std::vector<CtrlVec> dup = p.controls.points;
  dup.push_back(p.controls.points[0]);  // repeat u = -1 at the end
  BruteForceResult again = brute_force_value(p.dyn, p.t0, p.x0, 2,
                                             ControlSet::finite(dup), 32, cfg);
  CHECK(again.estimate.mean == base.estimate.mean);
  CHECK(again.choice == base.choice);  // strict < keeps the earliest argmin
}

TEST_CASE("brute force: enlarging the control set never raises the value") {
  Problem p = make_problem("circle-diffusive");
  IntegratorConfig cfg;
  cfg.dt = 1e-2;
  cfg.seed = 13;

  ControlSet small = ControlSet::finite({ctrl1(0.0), ctrl1(1.0)});
  ControlSet large =
      ControlSet::finite({ctrl1(0.0), ctrl1(1.0), ctrl1(-1.0), ctrl1(0.5)});
  BruteForceResult lo = brute_force_value(p.dyn, p.t0, p.x0, 2, small, 32, cfg);
  BruteForceResult hi = brute_force_value(p.dyn, p.t0, p.x0, 2, large, 32, cfg);
  // common random numbers: the superset dominates deterministically
  CHECK(hi.estimate.mean <= lo.estimate.mean);
}

TEST_CASE("brute force: guards") {
  Problem p = make_problem("circle-steering");
  IntegratorConfig cfg;
  cfg.dt = 1e-2;

  // 3^13 = 1594323 candidates exceeds the 1e6 enumeration budget
  CHECK_THROWS_AS(brute_force_value(p.dyn, p.t0, p.x0, 13, p.controls, 2, cfg),
                  EnumerationTooLarge);
  CHECK_NOTHROW(brute_force_value(p.dyn, p.t0, p.x0, 3, p.controls, 2, cfg));
  CHECK_THROWS_AS(brute_force_value(p.dyn, p.t0, p.x0, 0, p.controls, 2, cfg),
                  ConfigError);
  CHECK_THROWS_AS(
      brute_force_value(p.dyn, p.t0, p.x0, 1, ControlSet::finite({}), 2, cfg),
      ConfigError);
}

TEST_CASE("dpp gap: constant field over frozen dynamics is consistent") {
  ControlledDynamics dyn = frozen_sphere(0.0);
  ManifoldGrid grid = ManifoldGrid::sphere_icosahedral(2);
  ValueField field(grid);
  field.times = {0.0, 1.0};
  field.values = {RVec::Constant(grid.num_nodes(), 2.75),
                  RVec::Constant(grid.num_nodes(), 2.75)};
  field.dt = 1.0;

  IntegratorConfig cfg;
  cfg.dt = 0.1;
  Vec x = Vec::Zero(3);
  x[2] = 1.0;
  ControlSet U = ControlSet::singleton();

  CHECK(dpp_gap(dyn, 0.0, 0.5, x, field, U, 4, cfg) <= 1e-12);

  CHECK_THROWS_AS(dpp_gap(dyn, 0.5, 0.5, x, field, U, 4, cfg), ConfigError);
  CHECK_THROWS_AS(dpp_gap(dyn, 0.0, 1.5, x, field, U, 4, cfg), ConfigError);
}

TEST_CASE("dpp gap: steering value function satisfies the principle") {
  Problem p = make_problem("circle-steering");
  p.dyn.horizon = 0.5;
  const double T = 0.5;

  // analytic value: V(t, theta) = min sin over the reachable arc, |u| <= 1
  ManifoldGrid grid = ManifoldGrid::circle_ring(400);
  ValueField field(grid);
  field.times = {0.0, 0.1, T};
  field.dt = 0.1;
  for (double t : field.times) {
    RVec slice(grid.num_nodes());
    for (int i = 0; i < grid.num_nodes(); ++i) {
      const Vec node = grid.node(i);
      const double theta = std::atan2(node[1], node[0]);
      slice[i] = min_sin_over(theta - (T - t), theta + (T - t));
    }
    field.values.push_back(slice);
  }

  IntegratorConfig cfg;
  cfg.dt = 1e-3;
  const Vec x = circle_point(1.0);

  SUBCASE("interior step") {
    const double gap = dpp_gap(p.dyn, 0.0, 0.1, x, field, p.controls, 2, cfg);
    CHECK(gap <= 1e-3);
  }
  SUBCASE("step to the horizon hits the terminal slice") {
    const double gap = dpp_gap(p.dyn, 0.0, T, x, field, p.controls, 2, cfg);
    CHECK(gap <= 1e-3);
  }
  SUBCASE("a coarsely wrong field is flagged") {
    ValueField off = field;
    for (auto& slice : off.values) slice.array() += 0.25;
    off.values.front().array() -= 0.25;  // only the t=0 slice kept honest
    const double gap = dpp_gap(p.dyn, 0.0, 0.1, x, off, p.controls, 2, cfg);
    CHECK(gap >= 0.2);
  }
}
