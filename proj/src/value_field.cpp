#include "manoc/value_field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace manoc {

int ValueField::slice_index(double t, double tol) const {
  for (size_t k = 0; k < times.size(); ++k)
    if (std::abs(times[k] - t) <= tol) return int(k);
  return -1;
}

double ValueField::eval_slice(int k, const Vec& x) const {
  return grid.interpolate(values[size_t(k)], x);
}

double ValueField::eval(double t, const Vec& x) const {
  if (times.empty()) throw Error("empty value field");
  if (t <= times.front()) return eval_slice(0, x);
  if (t >= times.back()) return eval_slice(num_slices() - 1, x);
  auto it = std::upper_bound(times.begin(), times.end(), t);
  int k = int(it - times.begin()) - 1;
  double t0 = times[size_t(k)], t1 = times[size_t(k) + 1];
  double a = (t - t0) / (t1 - t0);
  return (1.0 - a) * eval_slice(k, x) + a * eval_slice(k + 1, x);
}

double ValueField::min_value() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& v : values) m = std::min(m, v.minCoeff());
  return m;
}

double ValueField::max_value() const {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& v : values) m = std::max(m, v.maxCoeff());
  return m;
}

void ValueField::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  char buf[64];
  auto fmt = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  out << "value-field v1\n";
  out << "model " << grid.model().name() << "\n";
  out << "resolution " << grid.resolution() << "\n";
  out << "nodes " << grid.num_nodes() << "\n";
  out << "slices " << times.size() << "\n";
  out << "dt " << fmt(dt) << "\n";
  for (size_t k = 0; k < times.size(); ++k) {
    for (int i = 0; i < grid.num_nodes(); ++i) {
      out << fmt(times[k]) << ' ' << i;
      const Vec& p = grid.node(i);
      for (int d = 0; d < p.size(); ++d) out << ' ' << fmt(p[d]);
      out << ' ' << fmt(values[k][i]) << "\n";
    }
  }
  if (!out) throw ConfigError("write failed: " + path);
}

ValueField ValueField::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::string line, word;
  auto expect_kv = [&](const std::string& key) {
    if (!std::getline(in, line)) throw ConfigError("truncated header: " + path);
    std::istringstream ss(line);
    std::string k;
    ss >> k;
    if (k != key) throw ConfigError("expected '" + key + "' in " + path);
    std::string rest;
    ss >> rest;
    return rest;
  };
  if (!std::getline(in, line) || line != "value-field v1")
    throw ConfigError("not a value-field file: " + path);
  std::string model = expect_kv("model");
  int resolution = std::stoi(expect_kv("resolution"));
  int nodes = std::stoi(expect_kv("nodes"));
  int slices = std::stoi(expect_kv("slices"));
  double dt = std::stod(expect_kv("dt"));

  ValueField vf(ManifoldGrid::for_model(Manifold::by_name(model), resolution));
  if (vf.grid.num_nodes() != nodes)
    throw ConfigError("node count mismatch in " + path);
  vf.dt = dt;
  vf.times.reserve(size_t(slices));
  vf.values.assign(size_t(slices), RVec::Zero(nodes));

  const int ad = vf.grid.model().ambient_dim();
  for (int k = 0; k < slices; ++k) {
    for (int i = 0; i < nodes; ++i) {
      double t, val;
      int id;
      Vec p(ad);
      if (!(in >> t >> id)) throw ConfigError("truncated data: " + path);
      for (int d = 0; d < ad; ++d) in >> p[d];
      in >> val;
      if (id != i) throw ConfigError("node order mismatch in " + path);
      if ((p - vf.grid.node(i)).norm() > 1e-9)
        throw ConfigError("node coordinates mismatch in " + path);
      if (i == 0) vf.times.push_back(t);
      else if (std::abs(t - vf.times.back()) > 1e-12)
        throw ConfigError("inconsistent slice time in " + path);
      vf.values[size_t(k)][i] = val;
    }
  }
  return vf;
}

}  // namespace manoc
