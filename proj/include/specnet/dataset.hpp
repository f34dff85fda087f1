#pragma once

#include "specnet/network.hpp"
#include "specnet/tensor.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace specnet {

/// KA5 main groups, indexed in this order throughout.
enum class SoilClass : std::uint8_t { L = 0, S = 1, T = 2, U = 3 };

inline constexpr std::size_t soil_class_count = 4;
inline constexpr std::array<SoilClass, soil_class_count> all_soil_classes{
    SoilClass::L, SoilClass::S, SoilClass::T, SoilClass::U};

char to_char(SoilClass cls);
SoilClass parse_soil_class(std::string_view text);
constexpr std::size_t class_index(SoilClass cls) noexcept { return static_cast<std::size_t>(cls); }
SoilClass soil_class_from_index(std::size_t index);

/// Particle-size distribution in percent.
struct Texture {
    double clay_pct = 0.0;
    double silt_pct = 0.0;
    double sand_pct = 0.0;

    friend bool operator==(const Texture&, const Texture&) = default;
};

inline constexpr double texture_sum_tolerance = 1.5;

/// Throws unless all fractions are non-negative and sum to 100 within
/// `texture_sum_tolerance`.
void validate_texture(const Texture& texture, std::string_view context = {});

struct Sample {
    std::string id;
    /// (1 x bands) reflectance.
    Tensor spectrum;
    std::optional<Texture> texture;
    std::optional<SoilClass> label;

    friend bool operator==(const Sample&, const Sample&) = default;
};

struct DatasetSplit {
    std::vector<Sample> train;
    std::vector<Sample> validation;
    std::vector<Sample> test;
};

inline constexpr std::size_t raw_band_count = 4200;
inline constexpr std::size_t reduced_band_count = 256;

// ---------------------------------------------------------------- band reduction

/// Sizes of the contiguous band groups that average `input_bands` down to
/// `output_bands`. Group i covers [floor(i*N/B), floor((i+1)*N/B)), which
/// spreads the larger groups evenly along the spectrum.
std::vector<std::size_t> band_group_sizes(std::size_t input_bands, std::size_t output_bands);

/// Averages contiguous groups of bands; any input length >= output_bands.
Tensor average_bands(const Tensor& spectrum, std::size_t output_bands);

/// 4200 raw bands -> 256 bands (152 groups of 16, 104 groups of 17).
Tensor reduce_bands(const Tensor& spectrum);

// ---------------------------------------------------------------- duplicates

/// One sample per id, in order of first appearance. The retained spectrum
/// is the per-band mean over all spectra of that id; texture and label
/// come from the first occurrence.
std::vector<Sample> deduplicate(std::span<const Sample> samples);

inline constexpr double duplicate_texture_tolerance = 0.5;

// ---------------------------------------------------------------- splitting

struct SplitRatios {
    double train = 0.6;
    double validation = 0.2;
    double test = 0.2;
};

/// Seeded random permutation cut into train/validation/test with
/// round(n*train) and round(n*validation) samples in the first two parts.
/// With `stratified`, each class is split that way separately and the
/// parts are concatenated in class order.
DatasetSplit split(std::span<const Sample> samples, const SplitRatios& ratios, std::uint64_t seed,
                   bool stratified = false);

std::array<std::size_t, 3> split_sizes(std::size_t n, const SplitRatios& ratios);

/// Per-class sample counts (unlabeled samples are ignored).
std::array<std::size_t, soil_class_count> class_counts(std::span<const Sample> samples);

/// Per-band z-score statistics; zero-variance bands get scale 1.
InputScaling fit_standardization(std::span<const Sample> samples);

/// Labels as class indices; throws on an unlabeled sample.
std::vector<std::size_t> label_indices(std::span<const Sample> samples);

} // namespace specnet
