#pragma once

#include "specnet/dataset.hpp"

#include <cstdint>
#include <vector>

namespace specnet {

struct SynthConfig {
    std::size_t n_per_class = 500;
    std::uint64_t seed = 0;
    std::size_t bands = reduced_band_count;
    /// Standard deviation of the i.i.d. Gaussian noise added per band.
    double noise_sigma = 0.01;
    /// Per-sample multiplicative brightness drawn from [1 - j, 1 + j].
    double brightness_jitter = 0.05;
    /// Extra noisy re-measurements emitted per sample (same id).
    std::size_t repeats = 0;
};

/// Noise-free reflectance curve of a class: sloped baseline with two or
/// three Gaussian absorption dips, evaluated on `bands` evenly spaced
/// positions.
std::vector<double> class_template(SoilClass cls, std::size_t bands);

/// Texture near the centre of a class region of the default boundary table.
Texture class_texture(SoilClass cls);

/// Labelled spectra with textures, classes interleaved L,S,T,U. Ids are
/// "synth-<class>-<n>". Deterministic per seed.
std::vector<Sample> synth_generate(const SynthConfig& config);

} // namespace specnet
