#pragma once

#include "specnet/tensor.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace specnet {

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// First/second moment estimates, one pair per parameter tensor.
struct AdamState {
    AdamState() = default;
    AdamState(std::span<const Tensor> parameters, AdamConfig config);

    AdamConfig config;
    std::vector<Tensor> first_moment;
    std::vector<Tensor> second_moment;
    std::uint64_t step = 0;
};

/// One bias-corrected Adam update of `parameters` in place.
///
/// Rejects non-finite gradients before touching any state, so a failed
/// call leaves parameters and moments unchanged.
void adam_step(std::span<Tensor> parameters, std::span<const Tensor> gradients,
               AdamState& state);

} // namespace specnet
