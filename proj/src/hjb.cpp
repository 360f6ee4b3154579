#include "manoc/hjb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace manoc {

namespace {

// bracketing slice pair and time weight reproducing ValueField::eval's
// clamped linear rule: value(t) = v[k0] + theta * (v[k1] - v[k0])
struct TimeBracket {
  int k0 = 0, k1 = 0;
  double theta = 0.0;
};

TimeBracket time_bracket(const ValueField& field, double t) {
  const auto& ts = field.times;
  if (ts.empty()) throw ConfigError("value field has no slices");
  TimeBracket b;
  if (t <= ts.front()) return b;
  if (t >= ts.back()) {
    b.k0 = b.k1 = int(ts.size()) - 1;
    return b;
  }
  const auto it = std::upper_bound(ts.begin(), ts.end(), t);
  b.k1 = int(it - ts.begin());
  b.k0 = b.k1 - 1;
  b.theta = (t - ts[size_t(b.k0)]) / (ts[size_t(b.k1)] - ts[size_t(b.k0)]);
  return b;
}

// least-squares quadratic model fit over the given stencil nodes; returns
// false when the regression is rank-deficient
bool fit_quadratic(const ValueField& field, const TimeBracket& tb,
                   const Vec& x, const Mat& basis,
                   const std::vector<int>& stencil, LocalDerivatives& out) {
  const Manifold& M = field.grid.model();
  const int d = int(basis.cols());
  const int n_quad = d * (d + 1) / 2;
  const int unknowns = 1 + d + n_quad;
  const int rows = int(stencil.size());
  if (rows < unknowns) return false;

  // bandwidth for the Gaussian weights: mean stencil radius
  double mean_r = 0.0;
  std::vector<Vec> logs(stencil.size());
  for (size_t j = 0; j < stencil.size(); ++j) {
    logs[j] = M.log(x, field.grid.node(stencil[j]));
    mean_r += logs[j].norm();
  }
  mean_r = std::max(mean_r / double(rows), 1e-12);

  Mat D(rows, unknowns);
  RVec rhs(rows);
  for (int r = 0; r < rows; ++r) {
    const Vec w = basis.transpose() * logs[size_t(r)];
    const double sw = std::exp(-w.squaredNorm() / (2.0 * mean_r * mean_r));
    int c = 0;
    D(r, c++) = sw;
    for (int a = 0; a < d; ++a) D(r, c++) = sw * w[a];
    for (int a = 0; a < d; ++a)
      for (int b = a; b < d; ++b)
        D(r, c++) = sw * (a == b ? 0.5 * w[a] * w[a] : w[a] * w[b]);
    const int id = stencil[size_t(r)];
    const double va = field.values[size_t(tb.k0)][id];
    const double vb = field.values[size_t(tb.k1)][id];
    rhs[r] = sw * (va + tb.theta * (vb - va));
  }

  Eigen::ColPivHouseholderQR<Mat> qr(D);
  qr.setThreshold(1e-10);
  if (qr.rank() < unknowns) return false;
  const RVec coef = qr.solve(rhs);

  out.point = x;
  out.basis = basis;
  out.value = coef[0];
  out.chi = coef.segment(1, d);
  out.A = Mat::Zero(d, d);
  int c = 1 + d;
  for (int a = 0; a < d; ++a)
    for (int b = a; b < d; ++b) {
      out.A(a, b) = coef[c];
      out.A(b, a) = coef[c];
      ++c;
    }
  return true;
}

void grow_ring(const ManifoldGrid& grid, std::set<int>& ids) {
  std::set<int> next = ids;
  for (int i : ids)
    for (int nb : grid.neighbors(i)) next.insert(nb);
  ids.swap(next);
}

}  // namespace

double LocalDerivatives::pair(const Vec& w) const {
  return chi.dot(basis.transpose() * w);
}

double LocalDerivatives::quad(const Vec& v, const Vec& w) const {
  const Vec a = basis.transpose() * v;
  const Vec b = basis.transpose() * w;
  return a.dot(A * b);
}

double hamiltonian(const ControlledDynamics& dyn, double t, const Vec& x,
                   const CtrlVec& u, const LocalDerivatives& deriv) {
  const ExtensionConfig ext = ExtensionConfig::for_model(dyn.model);
  double quad_sum = 0.0;
  for (int i = 0; i < dyn.num_diffusion; ++i) {
    const Vec s = dyn.diffusion[size_t(i)](t, x, u);
    quad_sum += deriv.quad(s, s);
  }
  const Vec b0 = stratonovich_drift(dyn, ext, t, x, u);
  return 0.5 * quad_sum + deriv.pair(b0) + dyn.running_cost(t, x, u);
}

HamiltonianMin min_hamiltonian(const ControlledDynamics& dyn, double t,
                               const Vec& x, const LocalDerivatives& deriv,
                               const ControlSet& U_h) {
  if (U_h.size() == 0) throw ConfigError("empty control set");
  HamiltonianMin best;
  best.value = std::numeric_limits<double>::infinity();
  for (int i = 0; i < int(U_h.size()); ++i) {
    const double v = hamiltonian(dyn, t, x, U_h.points[size_t(i)], deriv);
    if (v < best.value) {  // strict: ties keep the lowest index
      best.value = v;
      best.index = i;
      best.control = U_h.points[size_t(i)];
    }
  }
  return best;
}

RVec semi_lagrangian_step(const ControlledDynamics& dyn,
                          const ManifoldGrid& grid, const RVec& v_next,
                          double t, double dt, const ControlSet& U_h) {
  if (dt <= 0.0) throw ConfigError("semi-Lagrangian step needs dt > 0");
  if (U_h.size() == 0) throw ConfigError("empty control set");
  if (v_next.size() != grid.num_nodes())
    throw ConfigError("slice size does not match the grid");
  const int m = dyn.num_diffusion;
  const double reach =
      dyn.field_bound * dt + std::sqrt(2.0 * m * dt) * dyn.field_bound;
  if (!(reach < dyn.model.safe_radius()))
    throw StepTooLarge("characteristic feet may leave the safe radius");

  const ExtensionConfig ext = ExtensionConfig::for_model(dyn.model);
  const double spread = std::sqrt(double(m) * dt);
  RVec out(grid.num_nodes());
  parallel_for(size_t(grid.num_nodes()), [&](size_t i) {
    const Vec& x = grid.node(int(i));
    double best = std::numeric_limits<double>::infinity();
    for (const CtrlVec& u : U_h.points) {
      const Vec b0 = stratonovich_drift(dyn, ext, t, x, u);
      double avg;
      if (m == 0) {
        avg = grid.interpolate(v_next, dyn.model.exp(x, dt * b0));
      } else {
        const Vec base = dt * b0;
        double acc = 0.0;
        for (int j = 0; j < m; ++j) {
          const Vec off = spread * dyn.diffusion[size_t(j)](t, x, u);
          acc += grid.interpolate(v_next, dyn.model.exp(x, base + off));
          acc += grid.interpolate(v_next, dyn.model.exp(x, base - off));
        }
        avg = acc / double(2 * m);
      }
      const double cand = dyn.running_cost(t, x, u) * dt + avg;
      if (cand < best) best = cand;
    }
    out[Eigen::Index(i)] = best;
  });
  return out;
}

ValueField solve_backward(const ControlledDynamics& dyn,
                          const ManifoldGrid& grid, double dt,
                          const ControlSet& U_h) {
  if (dt <= 0.0) throw ConfigError("solve_backward needs dt > 0");
  const double T = dyn.horizon;
  if (T <= 0.0) throw ConfigError("horizon must be positive");
  const long K = std::max(1L, std::lround(T / dt));
  const double dte = T / double(K);

  ValueField field(grid);
  field.dt = dte;
  field.times.resize(size_t(K) + 1);
  for (long k = 0; k <= K; ++k)
    field.times[size_t(k)] = (k == K) ? T : double(k) * dte;
  field.values.assign(size_t(K) + 1, RVec());

  RVec terminal(grid.num_nodes());
  for (int i = 0; i < grid.num_nodes(); ++i)
    terminal[i] = dyn.terminal_cost(grid.node(i));
  field.values[size_t(K)] = terminal;

  for (long k = K - 1; k >= 0; --k) {
    const double t = field.times[size_t(k)];
    const double h = field.times[size_t(k) + 1] - t;
    field.values[size_t(k)] =
        semi_lagrangian_step(dyn, grid, field.values[size_t(k) + 1], t, h, U_h);
  }
  return field;
}

LocalDerivatives local_derivatives(const ValueField& field, double t,
                                   const Vec& x) {
  if (field.num_slices() == 0) throw ConfigError("value field has no slices");
  const Manifold& M = field.grid.model();
  const TimeBracket tb = time_bracket(field, t);
  const Mat basis = M.tangent_basis(x);

  const ManifoldGrid::Support sup = field.grid.interpolation_support(x);
  std::set<int> ids;
  for (int j = 0; j < sup.count; ++j) ids.insert(sup.ids[size_t(j)]);
  grow_ring(field.grid, ids);

  LocalDerivatives out;
  std::vector<int> stencil(ids.begin(), ids.end());
  if (fit_quadratic(field, tb, x, basis, stencil, out)) return out;

  grow_ring(field.grid, ids);  // widen once before giving up
  stencil.assign(ids.begin(), ids.end());
  if (fit_quadratic(field, tb, x, basis, stencil, out)) return out;
  throw DegenerateStencil("local quadratic fit is rank-deficient");
}

double hjb_residual(const ControlledDynamics& dyn, const ValueField& field,
                    double t, const Vec& x, const ControlSet& U_h) {
  if (field.num_slices() < 2)
    throw ConfigError("residual needs at least two slices");
  const auto& ts = field.times;
  const int last = field.num_slices() - 1;
  double dVdt;
  const int k = field.slice_index(t);
  if (k > 0 && k < last) {
    dVdt = (field.eval_slice(k + 1, x) - field.eval_slice(k - 1, x)) /
           (ts[size_t(k) + 1] - ts[size_t(k) - 1]);
  } else if (k == 0) {
    dVdt = (field.eval_slice(1, x) - field.eval_slice(0, x)) / (ts[1] - ts[0]);
  } else if (k == last) {
    dVdt = (field.eval_slice(last, x) - field.eval_slice(last - 1, x)) /
           (ts[size_t(last)] - ts[size_t(last) - 1]);
  } else {
    // between slices: first difference of the bracketing pair
    const TimeBracket tb = time_bracket(field, t);
    dVdt = (field.eval_slice(tb.k1, x) - field.eval_slice(tb.k0, x)) /
           (ts[size_t(tb.k1)] - ts[size_t(tb.k0)]);
  }
  const LocalDerivatives deriv = local_derivatives(field, t, x);
  const HamiltonianMin h = min_hamiltonian(dyn, t, x, deriv, U_h);
  return std::abs(dVdt + h.value);
}

CtrlVec feedback_control(const ControlledDynamics& dyn,
                         const ValueField& field, double t, const Vec& x,
                         const ControlSet& U_h) {
  if (U_h.size() == 0) throw ConfigError("empty control set");
  if (U_h.size() == 1) return U_h.points[0];  // nothing to minimize
  const LocalDerivatives deriv = local_derivatives(field, t, x);
  return min_hamiltonian(dyn, t, x, deriv, U_h).control;
}

ClosedLoopGap closed_loop_gap(const ControlledDynamics& dyn,
                              const ValueField& field, double t0,
                              const Vec& x0, const ControlSet& U_h,
                              int n_paths, const IntegratorConfig& cfg) {
  ControlSignal policy =
      ControlSignal::feedback([&dyn, &field, &U_h](double t, const Vec& x) {
        return feedback_control(dyn, field, t, x, U_h);
      });
  const ValueEstimate est = estimate_J(dyn, t0, x0, policy, n_paths, cfg);
  ClosedLoopGap out;
  out.estimate = est;
  out.std_error = est.std_error;
  out.field_value = field.eval(t0, x0);
  out.gap = est.mean - out.field_value;
  return out;
}

}  // namespace manoc
