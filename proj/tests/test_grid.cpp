#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>

#include "doctest.h"
#include "manoc/value_field.hpp"

using namespace manoc;

namespace {

Vec sphere_pt(std::uint64_t seed, std::uint64_t k) {
  return Manifold::sphere2().sample_point(seed, k);
}

}  // namespace

TEST_CASE("circle ring grid") {
  auto g = ManifoldGrid::circle_ring(200);
  CHECK(g.num_nodes() == 200);
  CHECK(g.spacing() == doctest::Approx(2.0 * M_PI / 200).epsilon(1e-12));
  CHECK(g.describe() == "circle-ring-200");
  for (int i = 0; i < 200; i += 17) CHECK(g.model().on_manifold(g.node(i)));
  CHECK(g.neighbors(0) == std::vector<int>{1, 199});
  CHECK(g.neighbors(5) == std::vector<int>{4, 6});
  CHECK_THROWS_AS(ManifoldGrid::circle_ring(2), ConfigError);

  SUBCASE("support is the bracketing arc with linear weights") {
    // point 25% of the way from node 3 to node 4
    double th = 2.0 * M_PI * 3.25 / 200;
    Vec x(2);
    x << std::cos(th), std::sin(th);
    auto s = g.interpolation_support(x);
    CHECK(s.count == 2);
    CHECK(s.ids[0] == 3);
    CHECK(s.ids[1] == 4);
    CHECK(s.w[0] == doctest::Approx(0.75).epsilon(1e-9));
    CHECK(s.w[1] == doctest::Approx(0.25).epsilon(1e-9));
  }

  SUBCASE("interpolation is exact at nodes and monotone") {
    RVec vals(200);
    for (int i = 0; i < 200; ++i) vals[i] = std::sin(2.0 * M_PI * i / 200);
    for (int i = 0; i < 200; i += 11)
      CHECK(g.interpolate(vals, g.node(i)) ==
            doctest::Approx(vals[i]).epsilon(1e-12));
    RVec lower = vals, upper = vals;
    for (int i = 0; i < 200; i += 3) upper[i] += 0.5;
    for (int k = 0; k < 50; ++k) {
      Vec x = g.model().sample_point(77, k);
      CHECK(g.interpolate(lower, x) <= g.interpolate(upper, x) + 1e-14);
    }
  }
}

TEST_CASE("icosahedral sphere grids") {
  SUBCASE("node and face counts per level") {
    auto g0 = ManifoldGrid::sphere_icosahedral(0);
    CHECK(g0.num_nodes() == 12);
    CHECK(g0.triangles().size() == 20);
    auto g3 = ManifoldGrid::sphere_icosahedral(3);
    CHECK(g3.num_nodes() == 642);
    CHECK(g3.triangles().size() == 1280);
    CHECK(g3.describe() == "sphere2-icosa-3");
    auto g5 = ManifoldGrid::sphere_icosahedral(5);
    CHECK(g5.num_nodes() == 10242);
    CHECK(g5.triangles().size() == 20480);
  }

  SUBCASE("nodes on manifold, positive spacing, 5/6-valent adjacency") {
    auto g = ManifoldGrid::sphere_icosahedral(3);
    for (int i = 0; i < g.num_nodes(); i += 41)
      CHECK(g.model().on_manifold(g.node(i)));
    CHECK(g.spacing() > 0.0);
    int pentagons = 0;
    for (int i = 0; i < g.num_nodes(); ++i) {
      size_t deg = g.neighbors(i).size();
      CHECK((deg == 5 || deg == 6));
      if (deg == 5) ++pentagons;
    }
    CHECK(pentagons == 12);  // the original icosahedron vertices
  }

  SUBCASE("every query point gets nonnegative weights that reproduce it") {
    auto g = ManifoldGrid::sphere_icosahedral(3);
    for (int k = 0; k < 500; ++k) {
      Vec x = sphere_pt(500, k);
      auto s = g.interpolation_support(x);
      REQUIRE(s.count == 3);
      double tot = 0.0;
      Vec rec = Vec::Zero(3);
      for (int j = 0; j < 3; ++j) {
        CHECK(s.w[j] >= 0.0);
        tot += s.w[j];
        rec += s.w[j] * g.node(s.ids[j]);
      }
      CHECK(tot == doctest::Approx(1.0).epsilon(1e-12));
      CHECK((rec.normalized() - x).norm() < 1e-9);
    }
  }

  SUBCASE("interpolation: vertex exactness, constants, monotonicity") {
    auto g = ManifoldGrid::sphere_icosahedral(2);
    RVec vals(g.num_nodes());
    for (int i = 0; i < g.num_nodes(); ++i) vals[i] = g.node(i)[2];
    for (int i = 0; i < g.num_nodes(); i += 7)
      CHECK(g.interpolate(vals, g.node(i)) ==
            doctest::Approx(vals[i]).epsilon(1e-12));
    RVec ones = RVec::Constant(g.num_nodes(), 3.25);
    for (int k = 0; k < 100; ++k) {
      Vec x = sphere_pt(501, k);
      CHECK(g.interpolate(ones, x) == doctest::Approx(3.25).epsilon(1e-14));
    }
    RVec upper = vals;
    for (int i = 0; i < g.num_nodes(); i += 2) upper[i] += 0.3;
    for (int k = 0; k < 100; ++k) {
      Vec x = sphere_pt(502, k);
      CHECK(g.interpolate(vals, x) <= g.interpolate(upper, x) + 1e-14);
    }
  }

  SUBCASE("interpolation error of a smooth function shrinks ~4x per level") {
    auto coarse = ManifoldGrid::sphere_icosahedral(3);
    auto fine = ManifoldGrid::sphere_icosahedral(4);
    auto sup_err = [&](const ManifoldGrid& g) {
      RVec vals(g.num_nodes());
      for (int i = 0; i < g.num_nodes(); ++i) vals[i] = g.node(i)[2];
      double worst = 0.0;
      for (int k = 0; k < 2000; ++k) {
        Vec x = sphere_pt(503, k);
        worst = std::max(worst, std::abs(g.interpolate(vals, x) - x[2]));
      }
      return worst;
    };
    double e3 = sup_err(coarse), e4 = sup_err(fine);
    CHECK(e3 < 6e-3);
    CHECK(e4 < e3 / 2.5);
  }
}

TEST_CASE("value field evaluation and serialization") {
  auto g = ManifoldGrid::circle_ring(64);
  ValueField vf(g);
  vf.dt = 0.25;
  vf.times = {0.0, 0.25, 0.5};
  for (int k = 0; k < 3; ++k) {
    RVec v(64);
    for (int i = 0; i < 64; ++i)
      v[i] = k + std::cos(2.0 * M_PI * i / 64);
    vf.values.push_back(v);
  }

  SUBCASE("slice lookup and time interpolation") {
    CHECK(vf.slice_index(0.25) == 1);
    CHECK(vf.slice_index(0.3) == -1);
    Vec x = g.node(5);
    CHECK(vf.eval(0.25, x) == doctest::Approx(vf.eval_slice(1, x)).epsilon(1e-14));
    // midpoint in time = average of slices (values differ by constant 1)
    CHECK(vf.eval(0.125, x) ==
          doctest::Approx(0.5 * (vf.eval_slice(0, x) + vf.eval_slice(1, x)))
              .epsilon(1e-12));
    // clamped outside the span
    CHECK(vf.eval(-1.0, x) == doctest::Approx(vf.eval_slice(0, x)));
    CHECK(vf.eval(9.0, x) == doctest::Approx(vf.eval_slice(2, x)));
    CHECK(vf.min_value() == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(vf.max_value() == doctest::Approx(3.0).epsilon(1e-12));
  }

  SUBCASE("save/load round trip preserves everything") {
    const std::string path = "vf_roundtrip_test.txt";
    vf.save(path);
    auto back = ValueField::load(path);
    std::remove(path.c_str());
    CHECK(back.grid.num_nodes() == 64);
    CHECK(back.dt == vf.dt);
    REQUIRE(back.times.size() == vf.times.size());
    for (size_t k = 0; k < vf.times.size(); ++k) {
      CHECK(back.times[k] == vf.times[k]);
      CHECK((back.values[k] - vf.values[k]).cwiseAbs().maxCoeff() == 0.0);
    }
  }

  SUBCASE("load rejects foreign files") {
    const std::string path = "vf_bogus_test.txt";
    {
      std::FILE* f = std::fopen(path.c_str(), "w");
      std::fputs("something else\n", f);
      std::fclose(f);
    }
    CHECK_THROWS_AS(ValueField::load(path), ConfigError);
    std::remove(path.c_str());
  }
}
