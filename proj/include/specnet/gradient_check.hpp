#pragma once

#include "specnet/network.hpp"

#include <cstddef>
#include <cstdint>

namespace specnet {

struct GradientCheckOptions {
    double epsilon = 1e-5;
    /// Entries probed per parameter tensor; 0 probes every entry.
    std::size_t samples_per_tensor = 0;
    /// Selects the probed entries when sampling.
    std::uint64_t seed = 0;
    /// Lower bound on the relative-error denominator. The forward pass
    /// carries ~1e-15 of rounding noise in the loss, so at epsilon 1e-5 a
    /// numeric gradient is only resolved to ~1e-10; gradients below the
    /// floor are therefore held to an absolute error of floor * tolerance.
    double denominator_floor = 1e-4;
};

struct GradientCheckReport {
    double max_relative_error = 0.0;
    std::size_t checked = 0;
    /// Entries whose +/- perturbation crossed a relu kink or flipped a
    /// pooling argmax; the loss is not differentiable there.
    std::size_t skipped = 0;
    std::size_t worst_tensor = 0;
    std::size_t worst_index = 0;
    double worst_analytic = 0.0;
    double worst_numeric = 0.0;
};

/// Compares analytic parameter gradients of the softmax cross-entropy loss
/// against central finite differences,
///   |a - n| / max(|a|, |n|, floor).
GradientCheckReport gradient_check(const Network& network, const Tensor& input,
                                   std::size_t label, const GradientCheckOptions& options = {});

} // namespace specnet
