#pragma once

#include <cstdint>

#include "hptr/autodiff.hpp"
#include "hptr/model.hpp"

namespace hptr {

// Finite-difference check of the full sentence loss of a 64-bit model built
// from `config` on a random `length`-word sentence. All parameters are
// perturbed away from their initial values first so zero-initialized tensors
// (biases, the null dependent) are exercised at generic points.
ad::GradCheckResult check_sentence_loss_gradients(const ModelConfig& config, int length, std::uint64_t seed,
                                                  std::size_t samples = 200, double eps = 1e-5);

// A very small configuration for finite-difference checks.
ModelConfig gradcheck_config(SystemKind system, FusionKind fusion, GateKind gate);

}  // namespace hptr
