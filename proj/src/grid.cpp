#include "manoc/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_map>

#include <Eigen/Dense>

namespace manoc {

namespace {

constexpr double kInsideTol = -1e-12;  // sign-test slack at triangle edges

double det3(const Vec& a, const Vec& b, const Vec& c) {
  return a[0] * (b[1] * c[2] - b[2] * c[1]) -
         a[1] * (b[0] * c[2] - b[2] * c[0]) +
         a[2] * (b[0] * c[1] - b[1] * c[0]);
}

}  // namespace

struct ManifoldGrid::Impl {
  Manifold M = Manifold::circle();
  int resolution = 0;
  std::vector<Vec> nodes;
  std::vector<std::array<int, 3>> tris;
  std::vector<std::vector<int>> adj;
  double spacing = 0.0;

  // subdivision tree for point location on the sphere: level 0 holds the 20
  // icosahedron faces; each face has 4 children on the next level; the faces
  // of the last level are the mesh triangles (ids index `tris`).
  struct TreeLevel {
    std::vector<std::array<int, 3>> faces;       // node ids
    std::vector<std::array<int, 4>> children;    // indices into next level
  };
  std::vector<TreeLevel> tree;  // size = resolution (+ leaf faces in `tris`)

  int locate(const Vec& q) const;
};

namespace {

using Impl = ManifoldGrid::Impl;

void build_adjacency(Impl& g) {
  g.adj.assign(g.nodes.size(), {});
  for (const auto& t : g.tris) {
    for (int e = 0; e < 3; ++e) {
      int a = t[e], b = t[(e + 1) % 3];
      g.adj[a].push_back(b);
      g.adj[b].push_back(a);
    }
  }
  for (auto& lst : g.adj) {
    std::sort(lst.begin(), lst.end());
    lst.erase(std::unique(lst.begin(), lst.end()), lst.end());
  }
}

double min_edge_length(const Impl& g) {
  double m = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < g.adj.size(); ++i)
    for (int j : g.adj[i])
      if (j > int(i)) m = std::min(m, g.M.distance(g.nodes[i], g.nodes[j]));
  return m;
}

std::shared_ptr<Impl> build_circle(int n_nodes) {
  if (n_nodes < 3) throw ConfigError("circle grid needs at least 3 nodes");
  auto g = std::make_shared<Impl>();
  g->M = Manifold::circle();
  g->resolution = n_nodes;
  g->nodes.reserve(n_nodes);
  for (int k = 0; k < n_nodes; ++k) {
    double th = 2.0 * M_PI * k / n_nodes;
    Vec p(2);
    p << std::cos(th), std::sin(th);
    g->nodes.push_back(p);
  }
  g->adj.resize(n_nodes);
  for (int k = 0; k < n_nodes; ++k) {
    int prev = (k + n_nodes - 1) % n_nodes, next = (k + 1) % n_nodes;
    g->adj[k] = {std::min(prev, next), std::max(prev, next)};
  }
  g->spacing = 2.0 * M_PI / n_nodes;
  return g;
}

std::shared_ptr<Impl> build_sphere(int level) {
  if (level < 0 || level > 8) throw ConfigError("sphere grid level out of range");
  auto g = std::make_shared<Impl>();
  g->M = Manifold::sphere2();
  g->resolution = level;

  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  const double raw[12][3] = {
      {-1, phi, 0}, {1, phi, 0},   {-1, -phi, 0}, {1, -phi, 0},
      {0, -1, phi}, {0, 1, phi},   {0, -1, -phi}, {0, 1, -phi},
      {phi, 0, -1}, {phi, 0, 1},   {-phi, 0, -1}, {-phi, 0, 1}};
  for (auto& r : raw) {
    Vec p(3);
    p << r[0], r[1], r[2];
    g->nodes.push_back(p.normalized());
  }
  std::vector<std::array<int, 3>> faces = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  // enforce outward orientation so that inside-tests use consistent signs
  for (auto& f : faces)
    if (det3(g->nodes[f[0]], g->nodes[f[1]], g->nodes[f[2]]) < 0)
      std::swap(f[1], f[2]);

  std::unordered_map<std::uint64_t, int> midpoint;
  auto mid = [&](int a, int b) {
    std::uint64_t key =
        (std::uint64_t(std::min(a, b)) << 32) | std::uint64_t(std::max(a, b));
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    Vec p = (g->nodes[a] + g->nodes[b]).normalized();
    int id = int(g->nodes.size());
    g->nodes.push_back(p);
    midpoint.emplace(key, id);
    return id;
  };

  for (int l = 0; l < level; ++l) {
    Impl::TreeLevel tl;
    tl.faces = faces;
    tl.children.resize(faces.size());
    std::vector<std::array<int, 3>> next;
    next.reserve(faces.size() * 4);
    for (size_t f = 0; f < faces.size(); ++f) {
      auto [a, b, c] = faces[f];
      int ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
      int base = int(next.size());
      next.push_back({a, ab, ca});
      next.push_back({ab, b, bc});
      next.push_back({ca, bc, c});
      next.push_back({ab, bc, ca});
      tl.children[f] = {base, base + 1, base + 2, base + 3};
    }
    g->tree.push_back(std::move(tl));
    faces = std::move(next);
  }
  g->tris = std::move(faces);
  build_adjacency(*g);
  g->spacing = min_edge_length(*g);
  return g;
}

// signed side-tests of q against the oriented spherical triangle
double inside_score(const Impl& g, const std::array<int, 3>& f, const Vec& q) {
  const Vec& a = g.nodes[f[0]];
  const Vec& b = g.nodes[f[1]];
  const Vec& c = g.nodes[f[2]];
  return std::min({det3(a, b, q), det3(b, c, q), det3(c, a, q)});
}

}  // namespace

int ManifoldGrid::Impl::locate(const Vec& q) const {
  // root: best of the 20 icosahedron faces (or of `tris` when level == 0)
  const auto& rootFaces = tree.empty() ? tris : tree[0].faces;
  int best = 0;
  double bestScore = -std::numeric_limits<double>::infinity();
  for (size_t f = 0; f < rootFaces.size(); ++f) {
    double s = inside_score(*this, rootFaces[f], q);
    if (s > bestScore) {
      bestScore = s;
      best = int(f);
    }
  }
  for (size_t l = 0; l < tree.size(); ++l) {
    const auto& nextFaces = (l + 1 < tree.size()) ? tree[l + 1].faces : tris;
    int bestChild = -1;
    double childScore = -std::numeric_limits<double>::infinity();
    for (int c : tree[l].children[best]) {
      double s = inside_score(*this, nextFaces[c], q);
      if (s > childScore) {
        childScore = s;
        bestChild = c;
      }
    }
    best = bestChild;
  }
  return best;
}

ManifoldGrid::ManifoldGrid(std::shared_ptr<const Impl> impl)
    : impl_(std::move(impl)) {}

ManifoldGrid ManifoldGrid::circle_ring(int n_nodes) {
  return ManifoldGrid(build_circle(n_nodes));
}

ManifoldGrid ManifoldGrid::sphere_icosahedral(int level) {
  return ManifoldGrid(build_sphere(level));
}

ManifoldGrid ManifoldGrid::for_model(const Manifold& M, int resolution) {
  if (M.name() == "circle") return circle_ring(resolution);
  if (M.name() == "sphere2") return sphere_icosahedral(resolution);
  throw ConfigError("no grid construction for model " + M.name());
}

const Manifold& ManifoldGrid::model() const { return impl_->M; }
int ManifoldGrid::resolution() const { return impl_->resolution; }
int ManifoldGrid::num_nodes() const { return int(impl_->nodes.size()); }
const Vec& ManifoldGrid::node(int i) const { return impl_->nodes[size_t(i)]; }
const std::vector<Vec>& ManifoldGrid::nodes() const { return impl_->nodes; }

std::string ManifoldGrid::describe() const {
  if (impl_->M.name() == "circle")
    return "circle-ring-" + std::to_string(impl_->resolution);
  return "sphere2-icosa-" + std::to_string(impl_->resolution);
}

const std::vector<std::array<int, 3>>& ManifoldGrid::triangles() const {
  return impl_->tris;
}

const std::vector<int>& ManifoldGrid::neighbors(int i) const {
  return impl_->adj[size_t(i)];
}

double ManifoldGrid::spacing() const { return impl_->spacing; }

ManifoldGrid::Support ManifoldGrid::interpolation_support(const Vec& x) const {
  const auto& g = *impl_;
  Support s;
  if (g.M.name() == "circle") {
    const int n = int(g.nodes.size());
    double th = std::atan2(x[1], x[0]);
    if (th < 0) th += 2.0 * M_PI;
    double pos = th / (2.0 * M_PI) * n;
    int i = int(std::floor(pos));
    i = std::min(std::max(i, 0), n - 1);
    double t = std::min(std::max(pos - i, 0.0), 1.0);
    // snap angle-roundtrip noise so node queries reproduce node values exactly
    if (t < 1e-12) t = 0.0;
    if (t > 1.0 - 1e-12) {
      i = (i + 1) % n;
      t = 0.0;
    }
    s.count = 2;
    s.ids = {i, (i + 1) % n, -1};
    s.w = {1.0 - t, t, 0.0};
    return s;
  }
  const int f = g.locate(x);
  const auto& tri = g.tris[size_t(f)];
  Eigen::Matrix3d A;
  for (int j = 0; j < 3; ++j) A.col(j) = g.nodes[tri[j]].head<3>();
  Eigen::Vector3d lam = A.partialPivLu().solve(x.head<3>());
  // clamp edge-grazing negatives; weights stay a nonnegative partition of 1
  for (int j = 0; j < 3; ++j) lam[j] = std::max(lam[j], 0.0);
  double tot = lam.sum();
  if (tot <= 0) throw Error("degenerate interpolation weights");
  s.count = 3;
  for (int j = 0; j < 3; ++j) {
    s.ids[size_t(j)] = tri[j];
    s.w[size_t(j)] = lam[j] / tot;
  }
  // snap vertex-grazing queries so node values reproduce exactly
  for (int j = 0; j < 3; ++j) {
    if (s.w[size_t(j)] > 1.0 - 1e-12) {
      s.w = {0.0, 0.0, 0.0};
      s.w[size_t(j)] = 1.0;
      break;
    }
  }
  return s;
}

double ManifoldGrid::interpolate(const RVec& node_values, const Vec& x) const {
  auto s = interpolation_support(x);
  double v = 0.0;
  for (int j = 0; j < s.count; ++j) v += s.w[size_t(j)] * node_values[s.ids[size_t(j)]];
  return v;
}

}  // namespace manoc
