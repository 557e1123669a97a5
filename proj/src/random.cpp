#include "nmlr/random.hpp"

#include <cmath>

namespace nmlr {

double NormalSampler::uniform01() {
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double NormalSampler::operator()() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform01();  // (0, 1], keeps the log finite
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * M_PI * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

}  // namespace nmlr
