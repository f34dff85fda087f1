#include "specnet/synthetic.hpp"

#include "specnet/rng.hpp"

#include <cmath>
#include <string>

namespace specnet {

namespace {

struct Dip {
    double centre;
    double width;
    double depth;
};

struct ClassShape {
    double offset;
    double slope;
    std::vector<Dip> dips;
};

const ClassShape& shape_of(SoilClass cls)
{
    static const std::array<ClassShape, soil_class_count> shapes{{
        {0.28, 0.12, {{0.22, 0.030, 0.040}, {0.62, 0.045, 0.050}}},
        {0.48, 0.18, {{0.15, 0.025, 0.030}, {0.48, 0.035, 0.020}, {0.82, 0.040, 0.060}}},
        {0.18, 0.10, {{0.35, 0.040, 0.030}, {0.56, 0.030, 0.045}, {0.90, 0.035, 0.040}}},
        {0.40, 0.14, {{0.28, 0.050, 0.055}, {0.74, 0.030, 0.035}}},
    }};
    return shapes[class_index(cls)];
}

} // namespace

std::vector<double> class_template(SoilClass cls, std::size_t bands)
{
    if (bands < 2) {
        throw Error("synthetic spectra need at least 2 bands");
    }
    const ClassShape& shape = shape_of(cls);
    std::vector<double> values(bands);
    for (std::size_t b = 0; b < bands; ++b) {
        const double u = static_cast<double>(b) / static_cast<double>(bands - 1);
        double v = shape.offset + shape.slope * u;
        for (const Dip& dip : shape.dips) {
            const double z = (u - dip.centre) / dip.width;
            v -= dip.depth * std::exp(-0.5 * z * z);
        }
        values[b] = v;
    }
    return values;
}

Texture class_texture(SoilClass cls)
{
    switch (cls) {
    case SoilClass::L:
        return {22.0, 40.0, 38.0};
    case SoilClass::S:
        return {5.0, 10.0, 85.0};
    case SoilClass::T:
        return {60.0, 25.0, 15.0};
    case SoilClass::U:
        return {10.0, 75.0, 15.0};
    }
    throw Error("unknown soil class");
}

std::vector<Sample> synth_generate(const SynthConfig& config)
{
    if (config.n_per_class == 0) {
        throw Error("synthetic generator needs n_per_class >= 1");
    }
    std::array<std::vector<double>, soil_class_count> templates;
    for (SoilClass cls : all_soil_classes) {
        templates[class_index(cls)] = class_template(cls, config.bands);
    }

    Rng rng(config.seed);
    std::vector<Sample> samples;
    samples.reserve(config.n_per_class * soil_class_count * (1 + config.repeats));
    for (std::size_t n = 0; n < config.n_per_class; ++n) {
        for (SoilClass cls : all_soil_classes) {
            const std::vector<double>& base = templates[class_index(cls)];
            const double brightness =
                1.0 + config.brightness_jitter * (2.0 * rng.uniform() - 1.0);

            Texture texture = class_texture(cls);
            texture.clay_pct += rng.uniform(-2.0, 2.0);
            texture.silt_pct += rng.uniform(-2.0, 2.0);
            texture.sand_pct = 100.0 - texture.clay_pct - texture.silt_pct;

            const std::string id =
                std::string("synth-") + to_char(cls) + "-" + std::to_string(n);
            for (std::size_t r = 0; r <= config.repeats; ++r) {
                std::vector<double> values(config.bands);
                for (std::size_t b = 0; b < config.bands; ++b) {
                    values[b] = brightness * base[b];
                    if (config.noise_sigma > 0.0) {
                        values[b] += config.noise_sigma * rng.normal();
                    }
                }
                samples.push_back({id, Tensor::row(std::move(values)), texture, cls});
            }
        }
    }
    return samples;
}

} // namespace specnet
