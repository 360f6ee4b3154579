#pragma once

// Spatial grids for value computation: a uniform ring on the circle and
// icosahedral subdivision meshes on the sphere. Provides node access,
// adjacency, point location, and monotone (nonnegative-weight, partition of
// unity) linear interpolation:
//   circle  -- linear in arc length between adjacent ring nodes;
//   sphere2 -- barycentric weights from the radial projection onto the
//              containing triangle's plane, located by descending the
//              subdivision tree with spherical sign tests.

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "manoc/geometry.hpp"

namespace manoc {

class ManifoldGrid {
 public:
  // resolution = node count (>= 3)
  static ManifoldGrid circle_ring(int n_nodes);
  // resolution = subdivision level (>= 0); 10 * 4^level + 2 nodes
  static ManifoldGrid sphere_icosahedral(int level);
  // dispatch by model kind; resolution as above
  static ManifoldGrid for_model(const Manifold& M, int resolution);

  const Manifold& model() const;
  int resolution() const;
  int num_nodes() const;
  const Vec& node(int i) const;
  const std::vector<Vec>& nodes() const;
  std::string describe() const;

  // sphere: triangle list (empty for the circle)
  const std::vector<std::array<int, 3>>& triangles() const;
  // sorted adjacent node ids (ring: the two ring neighbors)
  const std::vector<int>& neighbors(int i) const;
  // minimum distance between adjacent nodes (> 0 by construction)
  double spacing() const;

  struct Support {
    std::array<int, 3> ids{-1, -1, -1};
    std::array<double, 3> w{0.0, 0.0, 0.0};
    int count = 0;
  };
  // containing element and interpolation weights: w >= 0, sum w = 1
  Support interpolation_support(const Vec& x) const;
  double interpolate(const RVec& node_values, const Vec& x) const;

  struct Impl;  // opaque shared storage; grids copy cheaply

 private:
  std::shared_ptr<const Impl> impl_;
  explicit ManifoldGrid(std::shared_ptr<const Impl> impl);
};

}  // namespace manoc
