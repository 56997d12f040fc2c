#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "grid.hpp"

namespace gradpres {

inline constexpr std::size_t kMinImageSide = 3;

/// Grayscale luminance image with every pixel in [0, 1] and both sides >= 3.
/// Immutable once built; derive new images through the free functions.
class GrayImage {
public:
    GrayImage() = default;

    GrayImage(std::size_t height, std::size_t width, double fill = 0.0)
        : GrayImage(RealGrid(height, width, fill)) {}

    explicit GrayImage(RealGrid pixels) : pixels_(std::move(pixels)) {
        if (pixels_.height() < kMinImageSide || pixels_.width() < kMinImageSide) {
            throw InvalidImage("image must be at least 3x3, got " +
                               std::to_string(pixels_.height()) + "x" +
                               std::to_string(pixels_.width()));
        }
        for (std::size_t i = 0; i < pixels_.size(); ++i) {
            const double v = pixels_[i];
            if (!(v >= 0.0 && v <= 1.0)) {
                throw InvalidImage("pixel " + std::to_string(i) + " = " + std::to_string(v) +
                                   " outside [0,1]");
            }
        }
    }

    /// Builds an image from f(h, w); the caller is responsible for the range.
    template <class F>
    static GrayImage generate(std::size_t height, std::size_t width, F&& f) {
        RealGrid g(height, width);
        for (std::size_t h = 0; h < height; ++h)
            for (std::size_t w = 0; w < width; ++w) g(h, w) = f(h, w);
        return GrayImage(std::move(g));
    }

    std::size_t height() const noexcept { return pixels_.height(); }
    std::size_t width() const noexcept { return pixels_.width(); }
    double operator()(std::size_t h, std::size_t w) const { return pixels_(h, w); }
    const RealGrid& pixels() const noexcept { return pixels_; }

    friend bool operator==(const GrayImage&, const GrayImage&) = default;

private:
    RealGrid pixels_;
};

/// Per-pixel gradient direction in radians. Angles satisfy |theta| <= the
/// double nearest pi/2, which lies below the true pi/2, so the open interval
/// (-pi/2, pi/2) holds exactly.
class GradientDirectionMap {
public:
    GradientDirectionMap() = default;

    GradientDirectionMap(RealGrid angles, double epsilon)
        : angles_(std::move(angles)), epsilon_(epsilon) {
        if (!(epsilon_ > 0.0)) throw InvalidArgument("GDM epsilon must be positive");
        for (double a : angles_) {
            if (!(std::abs(a) <= std::numbers::pi / 2)) {
                throw InvalidArgument("GDM angle " + std::to_string(a) + " outside (-pi/2, pi/2)");
            }
        }
    }

    std::size_t height() const noexcept { return angles_.height(); }
    std::size_t width() const noexcept { return angles_.width(); }
    double operator()(std::size_t h, std::size_t w) const { return angles_(h, w); }
    const RealGrid& angles() const noexcept { return angles_; }
    double epsilon() const noexcept { return epsilon_; }

    friend bool operator==(const GradientDirectionMap&, const GradientDirectionMap&) = default;

private:
    RealGrid angles_;
    double epsilon_ = 1e-8;
};

} // namespace gradpres
