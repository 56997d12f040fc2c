#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "image.hpp"

namespace gradpres {

struct SynthConfig {
    int classes = 8;
    int per_class = 40;
    std::size_t size = 64;
    double noise_std = 0.05;
    std::uint64_t seed = 0;
    double period = 8.0;     // grating wavelength, pixels
    double amplitude = 0.35; // around a mean of 0.5

    void validate() const {
        if (classes < 1 || classes > 16) throw InvalidArgument("synth: classes must be in [1,16]");
        if (per_class < 1) throw InvalidArgument("synth: per_class must be >= 1");
        if (size < 32) throw InvalidArgument("synth: size must be >= 32");
        if (!(noise_std >= 0.0)) throw InvalidArgument("synth: noise_std must be >= 0");
        if (!(period > 0.0)) throw InvalidArgument("synth: period must be > 0");
    }
};

struct LabeledImage {
    GrayImage image;
    int label = 0;
};

/// One sinusoidal grating with its wave vector at `orientation` radians.
inline GrayImage grating(std::size_t size, double orientation, double phase, double period,
                         double amplitude, double noise_std, std::mt19937_64& rng) {
    std::normal_distribution<double> noise(0.0, noise_std);
    const double c = std::cos(orientation), s = std::sin(orientation);
    const double k = 2.0 * std::numbers::pi / period;
    return GrayImage::generate(size, size, [&](std::size_t h, std::size_t w) {
        double v = 0.5 + amplitude * std::sin(k * (c * double(w) + s * double(h)) + phase);
        if (noise_std > 0.0) v += noise(rng);
        return std::clamp(v, 0.0, 1.0);
    });
}

/// Class k is a grating oriented at k*pi/K with a uniformly random phase plus
/// Gaussian pixel noise, clamped to [0,1]. Output is ordered by class, with
/// `per_class` images each.
inline std::vector<LabeledImage> synth_dataset(const SynthConfig& cfg) {
    cfg.validate();
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    std::vector<LabeledImage> out;
    out.reserve(std::size_t(cfg.classes) * std::size_t(cfg.per_class));
    for (int k = 0; k < cfg.classes; ++k) {
        const double orientation = k * std::numbers::pi / cfg.classes;
        for (int n = 0; n < cfg.per_class; ++n) {
            const double p = phase(rng);
            out.push_back({grating(cfg.size, orientation, p, cfg.period, cfg.amplitude,
                                   cfg.noise_std, rng),
                           k});
        }
    }
    return out;
}

} // namespace gradpres
