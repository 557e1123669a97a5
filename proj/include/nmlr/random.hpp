#pragma once

#include <cstdint>
#include <random>

namespace nmlr {

// Standard normal sampler with a fully pinned-down draw sequence: mt19937_64
// words mapped to [0,1) with 53-bit resolution, then Box-Muller. Both outputs
// of each transform are consumed before new uniforms are drawn, so a given
// seed yields one well-defined stream.
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) : gen_(seed) {}

  double operator()();

 private:
  double uniform01();  // [0, 1)

  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace nmlr
