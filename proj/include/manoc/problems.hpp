#pragma once

// Built-in benchmark problems:
//   circle-steering    deterministic drift control on S^1, sin terminal cost
//   sphere2-bm         uncontrolled Brownian motion on S^2 (projection frame)
//   sphere2-controlled drift + control-scaled diffusion on S^2
//   circle-diffusive   controlled drift with constant diffusion on S^1
// All diffusion fields register closed-form curve derivatives.

#include "manoc/control.hpp"
#include "manoc/fields.hpp"

#include <string>
#include <vector>

namespace manoc {

struct Problem {
  std::string name;
  std::string description;
  ControlledDynamics dyn;
  ControlSet controls;  // materialized U_h
  Vec x0;
  double t0 = 0.0;
};

Problem make_problem(const std::string& name);  // ConfigError on unknown id

struct ProblemInfo {
  std::string name;
  std::string description;
};
std::vector<ProblemInfo> list_problems();

}  // namespace manoc
