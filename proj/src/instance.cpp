#include "nmlr/instance.hpp"

#include "nmlr/random.hpp"

namespace nmlr {

namespace {

Matrix draw(NormalSampler& rng, Index rows, Index cols) {
  Matrix M(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) M(i, j) = rng();
  return M;
}

}  // namespace

Instance generate_instance(const InstanceSpec& spec) {
  if (spec.n < 1 || spec.p < 1 || spec.q < 1)
    throw std::invalid_argument("generate_instance: dimensions must be >= 1");
  if (spec.true_rank < 0 || spec.true_rank > std::min(spec.p, spec.q))
    throw std::invalid_argument("generate_instance: true_rank must lie in [0, min(p, q)]");
  if (!(spec.noise_std >= 0.0))
    throw std::invalid_argument("generate_instance: noise_std must be >= 0");

  NormalSampler rng(spec.seed);
  Instance inst;
  inst.X = draw(rng, spec.n, spec.p);
  if (spec.true_rank > 0) {
    Matrix P = draw(rng, spec.p, spec.true_rank);
    Matrix Q = draw(rng, spec.true_rank, spec.q);
    inst.B = P * Q;
  } else {
    inst.B = draw(rng, spec.p, spec.q);
  }
  inst.Y = inst.X * inst.B;
  if (spec.noise_std > 0.0) inst.Y += spec.noise_std * draw(rng, spec.n, spec.q);
  return inst;
}

}  // namespace nmlr
