#pragma once

// Shared building blocks: ambient vector types, the error taxonomy, the
// counter-based Gaussian generator and a small deterministic parallel map.

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace manoc {

// All supported manifolds embed in R^2..R^4, so dynamically sized vectors with
// compile-time max size 4 keep the hot loops free of heap traffic.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::AutoAlign, 4, 1>;
using CtrlVec = Vec;
using Mat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;  // node-indexed data (unbounded length)

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Projection target is ambiguous or undefined at the query point.
struct OutsideTubularNeighborhood : Error { using Error::Error; };
// log/transport requested across (or numerically at) the cut locus.
struct CutLocus : Error { using Error::Error; };
// A user-supplied drift/diffusion field returned a non-tangent vector.
struct NonTangentField : Error { using Error::Error; };
// A step or segment violates the geometric safe-radius guard.
struct StepTooLarge : Error { using Error::Error; };
// Least-squares stencil cannot identify the local quadratic model.
struct DegenerateStencil : Error { using Error::Error; };
// Brute-force control enumeration would exceed the candidate budget.
struct EnumerationTooLarge : Error { using Error::Error; };
// Boundary-value Jacobi solve hit a singular endpoint map.
struct ConjugatePoint : Error { using Error::Error; };
// Malformed experiment/problem configuration.
struct ConfigError : Error { using Error::Error; };

namespace rng {

// SplitMix64 finalizer; statistically solid as a keyed counter hash.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t key(std::uint64_t seed, std::uint64_t path,
                         std::uint64_t step, std::uint64_t slot) {
  std::uint64_t k = mix64(seed);
  k = mix64(k ^ (path + 0x632be59bd9b4e019ULL));
  k = mix64(k ^ (step + 0x9e6c63d0876a9a47ULL));
  k = mix64(k ^ (slot + 0xd1b54a32d192ed03ULL));
  return k;
}

// Standard normal draw as a pure function of (seed, path, step, slot):
// reproducible and order-independent, so parallel path batches never share
// generator state.
double normal(std::uint64_t seed, std::uint64_t path, std::uint64_t step,
              std::uint64_t slot);

// Uniform in [0,1) from the same keyed stream.
double uniform(std::uint64_t seed, std::uint64_t path, std::uint64_t step,
               std::uint64_t slot);

}  // namespace rng

// Runs fn(i) for i in [0,n); splits across hardware threads when available and
// degrades to a plain loop otherwise. Caller owns determinism by writing to
// index-addressed slots only.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace manoc
