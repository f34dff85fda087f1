#include "specnet/dataset.hpp"

#include "specnet/rng.hpp"

#include <cmath>
#include <numeric>
#include <unordered_map>

namespace specnet {

char to_char(SoilClass cls)
{
    static constexpr std::array<char, soil_class_count> letters{'L', 'S', 'T', 'U'};
    return letters.at(class_index(cls));
}

SoilClass parse_soil_class(std::string_view text)
{
    if (text.size() == 1) {
        switch (text[0]) {
        case 'L':
            return SoilClass::L;
        case 'S':
            return SoilClass::S;
        case 'T':
            return SoilClass::T;
        case 'U':
            return SoilClass::U;
        default:
            break;
        }
    }
    throw Error("unknown soil class '" + std::string(text) + "' (expected L, S, T or U)");
}

SoilClass soil_class_from_index(std::size_t index)
{
    if (index >= soil_class_count) {
        throw Error("soil class index " + std::to_string(index) + " out of range");
    }
    return all_soil_classes[index];
}

void validate_texture(const Texture& texture, std::string_view context)
{
    const std::string where = context.empty() ? std::string() : " (" + std::string(context) + ")";
    if (!(texture.clay_pct >= 0.0 && texture.silt_pct >= 0.0 && texture.sand_pct >= 0.0)) {
        throw Error("texture fractions must be non-negative and finite" + where);
    }
    const double total = texture.clay_pct + texture.silt_pct + texture.sand_pct;
    if (!(std::abs(total - 100.0) <= texture_sum_tolerance)) {
        throw Error("clay + silt + sand = " + std::to_string(total) + ", expected 100 +/- " +
                    std::to_string(texture_sum_tolerance) + where);
    }
}

std::vector<std::size_t> band_group_sizes(std::size_t input_bands, std::size_t output_bands)
{
    if (output_bands == 0 || input_bands < output_bands) {
        throw Error("cannot average " + std::to_string(input_bands) + " bands into " +
                    std::to_string(output_bands));
    }
    std::vector<std::size_t> sizes(output_bands);
    for (std::size_t i = 0; i < output_bands; ++i) {
        const std::size_t begin = i * input_bands / output_bands;
        const std::size_t end = (i + 1) * input_bands / output_bands;
        sizes[i] = end - begin;
    }
    return sizes;
}

Tensor average_bands(const Tensor& spectrum, std::size_t output_bands)
{
    const std::size_t n = spectrum.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (std::isnan(spectrum[i])) {
            throw Error("band reduction: NaN reflectance at band " + std::to_string(i));
        }
        if (!std::isfinite(spectrum[i])) {
            throw Error("band reduction: non-finite reflectance at band " + std::to_string(i));
        }
    }
    const std::vector<std::size_t> sizes = band_group_sizes(n, output_bands);
    Tensor out({1, output_bands});
    std::size_t begin = 0;
    for (std::size_t g = 0; g < output_bands; ++g) {
        // Averaging offsets from the first band keeps constant groups exact.
        const double anchor = spectrum[begin];
        double offset = 0.0;
        for (std::size_t b = begin; b < begin + sizes[g]; ++b) {
            offset += spectrum[b] - anchor;
        }
        out[g] = anchor + offset / static_cast<double>(sizes[g]);
        begin += sizes[g];
    }
    return out;
}

Tensor reduce_bands(const Tensor& spectrum)
{
    if (spectrum.size() != raw_band_count) {
        throw Error("band reduction expects " + std::to_string(raw_band_count) +
                    " raw bands, got " + std::to_string(spectrum.size()));
    }
    return average_bands(spectrum, reduced_band_count);
}

std::vector<Sample> deduplicate(std::span<const Sample> samples)
{
    std::vector<Sample> unique;
    std::vector<std::size_t> counts;
    std::unordered_map<std::string, std::size_t> position;

    for (const Sample& s : samples) {
        auto [it, inserted] = position.try_emplace(s.id, unique.size());
        if (inserted) {
            unique.push_back(s);
            counts.push_back(1);
            continue;
        }
        Sample& kept = unique[it->second];
        if (kept.spectrum.shape() != s.spectrum.shape()) {
            throw Error("duplicate sample '" + s.id + "' has spectra of different shapes " +
                        to_string(kept.spectrum.shape()) + " and " +
                        to_string(s.spectrum.shape()));
        }
        if (kept.texture.has_value() != s.texture.has_value()) {
            throw Error("duplicate sample '" + s.id + "' has inconsistent texture records");
        }
        if (kept.texture && s.texture) {
            const Texture& a = *kept.texture;
            const Texture& b = *s.texture;
            if (std::abs(a.clay_pct - b.clay_pct) > duplicate_texture_tolerance ||
                std::abs(a.silt_pct - b.silt_pct) > duplicate_texture_tolerance ||
                std::abs(a.sand_pct - b.sand_pct) > duplicate_texture_tolerance) {
                throw Error("duplicate sample '" + s.id + "' has conflicting soil percentages");
            }
        }
        if (kept.label != s.label && s.label.has_value() && kept.label.has_value()) {
            throw Error("duplicate sample '" + s.id + "' has conflicting labels");
        }
        auto sum = kept.spectrum.values();
        const auto add = s.spectrum.values();
        for (std::size_t i = 0; i < sum.size(); ++i) {
            sum[i] += add[i];
        }
        counts[it->second] += 1;
    }

    for (std::size_t i = 0; i < unique.size(); ++i) {
        if (counts[i] > 1) {
            const auto n = static_cast<double>(counts[i]);
            for (double& v : unique[i].spectrum.values()) {
                v /= n;
            }
        }
    }
    return unique;
}

std::array<std::size_t, 3> split_sizes(std::size_t n, const SplitRatios& ratios)
{
    if (!(ratios.train > 0.0 && ratios.validation > 0.0 && ratios.test > 0.0)) {
        throw Error("split ratios must be positive");
    }
    if (std::abs(ratios.train + ratios.validation + ratios.test - 1.0) > 1e-9) {
        throw Error("split ratios must sum to 1");
    }
    const auto count = static_cast<double>(n);
    auto train = static_cast<std::size_t>(std::llround(count * ratios.train));
    auto validation = static_cast<std::size_t>(std::llround(count * ratios.validation));
    train = std::min(train, n);
    validation = std::min(validation, n - train);
    return {train, validation, n - train - validation};
}

namespace {

void split_into(std::span<const Sample> samples, std::vector<std::size_t> order,
                const SplitRatios& ratios, Rng& rng, DatasetSplit& out)
{
    rng.shuffle(std::span<std::size_t>(order));
    const auto sizes = split_sizes(order.size(), ratios);
    for (std::size_t i = 0; i < order.size(); ++i) {
        const Sample& s = samples[order[i]];
        if (i < sizes[0]) {
            out.train.push_back(s);
        } else if (i < sizes[0] + sizes[1]) {
            out.validation.push_back(s);
        } else {
            out.test.push_back(s);
        }
    }
}

} // namespace

DatasetSplit split(std::span<const Sample> samples, const SplitRatios& ratios, std::uint64_t seed,
                   bool stratified)
{
    if (samples.size() < 3) {
        throw Error("cannot split " + std::to_string(samples.size()) +
                    " samples into three subsets");
    }
    split_sizes(samples.size(), ratios);

    DatasetSplit out;
    Rng rng(seed);
    if (!stratified) {
        std::vector<std::size_t> order(samples.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        split_into(samples, std::move(order), ratios, rng, out);
        return out;
    }

    std::array<std::vector<std::size_t>, soil_class_count> by_class;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!samples[i].label) {
            throw Error("stratified split: sample '" + samples[i].id + "' has no label");
        }
        by_class[class_index(*samples[i].label)].push_back(i);
    }
    for (auto& members : by_class) {
        if (!members.empty()) {
            split_into(samples, std::move(members), ratios, rng, out);
        }
    }
    return out;
}

std::array<std::size_t, soil_class_count> class_counts(std::span<const Sample> samples)
{
    std::array<std::size_t, soil_class_count> counts{};
    for (const Sample& s : samples) {
        if (s.label) {
            counts[class_index(*s.label)] += 1;
        }
    }
    return counts;
}

InputScaling fit_standardization(std::span<const Sample> samples)
{
    if (samples.empty()) {
        throw Error("cannot fit standardization on an empty sample set");
    }
    const std::size_t bands = samples.front().spectrum.size();
    std::vector<double> mean(bands, 0.0);
    for (const Sample& s : samples) {
        if (s.spectrum.size() != bands) {
            throw ShapeError("standardization: sample '" + s.id + "' has " +
                             std::to_string(s.spectrum.size()) + " bands, expected " +
                             std::to_string(bands));
        }
        for (std::size_t b = 0; b < bands; ++b) {
            mean[b] += s.spectrum[b];
        }
    }
    const auto n = static_cast<double>(samples.size());
    for (double& m : mean) {
        m /= n;
    }
    std::vector<double> scale(bands, 0.0);
    for (const Sample& s : samples) {
        for (std::size_t b = 0; b < bands; ++b) {
            const double d = s.spectrum[b] - mean[b];
            scale[b] += d * d;
        }
    }
    for (double& v : scale) {
        v = std::sqrt(v / n);
        if (!(v > 0.0)) {
            v = 1.0;
        }
    }
    return {std::move(mean), std::move(scale)};
}

std::vector<std::size_t> label_indices(std::span<const Sample> samples)
{
    std::vector<std::size_t> labels;
    labels.reserve(samples.size());
    for (const Sample& s : samples) {
        if (!s.label) {
            throw Error("sample '" + s.id + "' has no soil class label");
        }
        labels.push_back(class_index(*s.label));
    }
    return labels;
}

} // namespace specnet
