#pragma once

// Cost functional evaluation, streaming Monte Carlo value estimates, a
// brute-force dynamic-programming oracle over piecewise-constant controls
// (common random numbers make control comparisons deterministic), and the
// dynamic-programming-principle gap measurement against a value field.

#include "manoc/sde.hpp"
#include "manoc/value_field.hpp"

namespace manoc {

struct ValueEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  int n_paths = 0;
};

// left-endpoint quadrature of the running cost plus the terminal cost
double path_cost(const ControlledDynamics& dyn, const SamplePath& path);

// sample mean/stderr of path_cost over n_paths independent substreams,
// streamed (paths are never materialized)
ValueEstimate estimate_J(const ControlledDynamics& dyn, double t0,
                         const Vec& x0, const ControlSignal& u, int n_paths,
                         const IntegratorConfig& cfg);

struct BruteForceResult {
  ValueEstimate estimate;      // value of the best candidate
  ControlSignal control;       // the argmin open-loop signal
  std::vector<int> choice;     // control-point index per interval
  std::vector<double> breaks;  // the K+1 interval breakpoints
};

// exhaustive minimization of estimate_J over all |U_h|^K piecewise-constant
// controls on K equal intervals; all candidates share the same noise, so the
// returned minimum is exact for the sampled ensemble. Guard: at most 1e6
// candidates (EnumerationTooLarge).
BruteForceResult brute_force_value(const ControlledDynamics& dyn, double t0,
                                   const Vec& x0, int intervals,
                                   const ControlSet& U_h, int n_paths,
                                   const IntegratorConfig& cfg);

// |V~(t,x) - min_u E[ int_t^s f dr + V~(s, X(s)) ]| with u constant on [t,s]
// and V~ the field interpolant
double dpp_gap(const ControlledDynamics& dyn, double t, double s, const Vec& x,
               const ValueField& field, const ControlSet& U_h, int n_paths,
               const IntegratorConfig& cfg);

}  // namespace manoc
