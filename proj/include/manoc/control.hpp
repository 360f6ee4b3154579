#pragma once

// Control sets (finite atlases of a compact U, materialized box grids) and
// control signals (open-loop piecewise-constant, or feedback policies).

#include "manoc/core.hpp"

#include <functional>
#include <vector>

namespace manoc {

struct ControlSet {
  enum class Kind { Finite, Box };

  Kind kind = Kind::Finite;
  int dim = 0;
  std::vector<CtrlVec> points;  // materialized U_h, enumeration order is the
                                // tie-break order everywhere
  Vec box_lo, box_hi;           // populated for Kind::Box

  static ControlSet finite(std::vector<CtrlVec> pts);
  // Uniform grid over [lo,hi] with counts[a] >= 1 points per axis
  // (endpoints included; count 1 places the midpoint).
  static ControlSet box_grid(const Vec& lo, const Vec& hi,
                             const std::vector<int>& counts);
  // Single dimensionless control for uncontrolled dynamics.
  static ControlSet singleton();

  std::size_t size() const { return points.size(); }
};

class ControlSignal {
 public:
  // u(t) = values[j] on [breaks[j], breaks[j+1]); constant past the ends.
  static ControlSignal piecewise(std::vector<double> breaks,
                                 std::vector<CtrlVec> values);
  static ControlSignal constant(CtrlVec u);
  static ControlSignal feedback(std::function<CtrlVec(double, const Vec&)> fn);

  CtrlVec operator()(double t, const Vec& x) const;
  bool is_feedback() const { return static_cast<bool>(policy_); }

 private:
  ControlSignal() = default;
  std::vector<double> breaks_;
  std::vector<CtrlVec> values_;
  std::function<CtrlVec(double, const Vec&)> policy_;
};

}  // namespace manoc
