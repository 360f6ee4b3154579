#pragma once

// Time-sliced node values over a ManifoldGrid with monotone linear spatial
// interpolation and linear time interpolation, plus a self-describing text
// serialization (header, then one line per slice/node pair).

#include <string>
#include <vector>

#include "manoc/grid.hpp"

namespace manoc {

struct ValueField {
  explicit ValueField(ManifoldGrid g) : grid(std::move(g)) {}

  ManifoldGrid grid;
  std::vector<double> times;  // strictly increasing, last = horizon T
  std::vector<RVec> values;   // one value per node, per slice
  double dt = 0.0;            // nominal slice spacing

  int num_slices() const { return int(times.size()); }
  // index of the slice at time t (within tol), -1 if t is between slices
  int slice_index(double t, double tol = 1e-9) const;
  double eval_slice(int k, const Vec& x) const;
  // linear in t between bracketing slices, clamped outside the span
  double eval(double t, const Vec& x) const;
  double min_value() const;
  double max_value() const;

  void save(const std::string& path) const;
  static ValueField load(const std::string& path);
};

}  // namespace manoc
