#pragma once

#include "nmlr/linalg.hpp"

#include <cstdint>

namespace nmlr {

// Synthetic regression problem Y = X B + noise. true_rank = 0 draws a dense
// generic B; true_rank = k > 0 draws B as a product of p x k and k x q
// standard normal factors. Entries are drawn row-major in the order
// X, B (or its two factors), noise, from one seeded stream, so a given spec
// reproduces the same instance exactly.
struct InstanceSpec {
  Index n = 100;
  Index p = 200;
  Index q = 50;
  Index true_rank = 0;
  double noise_std = 0.01;
  std::uint64_t seed = 0;
};

struct Instance {
  Matrix X;  // n x p
  Matrix B;  // p x q ground truth
  Matrix Y;  // n x q
};

Instance generate_instance(const InstanceSpec& spec);

}  // namespace nmlr
