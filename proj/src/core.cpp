#include "manoc/core.hpp"

#include <cmath>
#include <thread>
#include <vector>

namespace manoc {

namespace rng {

double uniform(std::uint64_t seed, std::uint64_t path, std::uint64_t step,
               std::uint64_t slot) {
  const std::uint64_t h = mix64(key(seed, path, step, slot));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double normal(std::uint64_t seed, std::uint64_t path, std::uint64_t step,
              std::uint64_t slot) {
  const std::uint64_t k = key(seed, path, step, slot);
  const std::uint64_t h1 = mix64(k ^ 0xa0761d6478bd642fULL);
  const std::uint64_t h2 = mix64(k ^ 0xe7037ed1a0b428dbULL);
  // Box-Muller; offsets keep u1 strictly inside (0,1).
  const double u1 = (static_cast<double>(h1 >> 11) + 0.5) * 0x1.0p-53;
  const double u2 = (static_cast<double>(h2 >> 11) + 0.5) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace rng

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const unsigned hw = std::thread::hardware_concurrency();
  const std::size_t workers = std::min<std::size_t>(hw == 0 ? 1 : hw, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace manoc
