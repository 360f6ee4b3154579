#include "manoc/control.hpp"

#include <algorithm>

namespace manoc {

ControlSet ControlSet::finite(std::vector<CtrlVec> pts) {
  if (pts.empty()) throw ConfigError("control set must be nonempty");
  ControlSet s;
  s.kind = Kind::Finite;
  s.dim = static_cast<int>(pts.front().size());
  for (const auto& p : pts)
    if (p.size() != s.dim)
      throw ConfigError("control points have inconsistent dimensions");
  s.points = std::move(pts);
  return s;
}

ControlSet ControlSet::box_grid(const Vec& lo, const Vec& hi,
                                const std::vector<int>& counts) {
  const int k = static_cast<int>(lo.size());
  if (hi.size() != k || static_cast<int>(counts.size()) != k)
    throw ConfigError("box bounds/counts dimension mismatch");
  for (int a = 0; a < k; ++a) {
    if (counts[a] < 1) throw ConfigError("box grid needs >= 1 point per axis");
    if (lo[a] > hi[a]) throw ConfigError("box bounds reversed");
  }
  ControlSet s;
  s.kind = Kind::Box;
  s.dim = k;
  s.box_lo = lo;
  s.box_hi = hi;
  std::size_t total = 1;
  for (int c : counts) total *= static_cast<std::size_t>(c);
  s.points.reserve(total);
  std::vector<int> idx(k, 0);
  for (std::size_t n = 0; n < total; ++n) {
    CtrlVec u(k);
    for (int a = 0; a < k; ++a)
      u[a] = counts[a] == 1 ? 0.5 * (lo[a] + hi[a])
                            : lo[a] + (hi[a] - lo[a]) * idx[a] / (counts[a] - 1);
    s.points.push_back(u);
    for (int a = k - 1; a >= 0; --a) {  // last axis fastest
      if (++idx[a] < counts[a]) break;
      idx[a] = 0;
    }
  }
  return s;
}

ControlSet ControlSet::singleton() {
  ControlSet s;
  s.kind = Kind::Finite;
  s.dim = 0;
  s.points = {CtrlVec()};
  return s;
}

ControlSignal ControlSignal::piecewise(std::vector<double> breaks,
                                       std::vector<CtrlVec> values) {
  if (breaks.size() != values.size() + 1 || values.empty())
    throw ConfigError("piecewise control needs J+1 breakpoints for J values");
  if (!std::is_sorted(breaks.begin(), breaks.end()))
    throw ConfigError("breakpoints must be increasing");
  ControlSignal s;
  s.breaks_ = std::move(breaks);
  s.values_ = std::move(values);
  return s;
}

ControlSignal ControlSignal::constant(CtrlVec u) {
  ControlSignal s;
  s.breaks_ = {0.0, 1.0};
  s.values_ = {std::move(u)};
  return s;
}

ControlSignal ControlSignal::feedback(
    std::function<CtrlVec(double, const Vec&)> fn) {
  ControlSignal s;
  s.policy_ = std::move(fn);
  return s;
}

CtrlVec ControlSignal::operator()(double t, const Vec& x) const {
  if (policy_) return policy_(t, x);
  // index of the interval containing t, clamped to the span
  const auto it = std::upper_bound(breaks_.begin() + 1, breaks_.end() - 1, t);
  const std::size_t j = static_cast<std::size_t>(it - breaks_.begin()) - 1;
  return values_[std::min(j, values_.size() - 1)];
}

}  // namespace manoc
