#pragma once

#include <algorithm>
#include <cmath>

#include "image.hpp"

namespace gradpres {

enum class BorderPolicy {
    ReplicateEdge, // out-of-range neighbours clamp to the nearest row/column
    SkipBorder,    // differences on the outermost ring are zero
};

struct GdmConfig {
    double epsilon = 1e-8;
    BorderPolicy border = BorderPolicy::ReplicateEdge;

    void validate() const {
        if (!(epsilon > 0.0)) throw InvalidArgument("GdmConfig.epsilon must be > 0");
    }
};

struct CentralDifferences {
    RealGrid vertical;   // x(h+1, w) - x(h-1, w)
    RealGrid horizontal; // x(h, w+1) - x(h, w-1)
};

namespace detail {

/// Neighbour indices used for the central difference at (h, w). `valid` is
/// false for border pixels under SkipBorder; those pixels have no
/// dependence on the image.
struct Stencil {
    std::size_t up, down, right, left; // rows h+1, h-1; cols w+1, w-1
    bool valid;
};

inline Stencil stencil(std::size_t h, std::size_t w, std::size_t height, std::size_t width,
                       BorderPolicy policy) noexcept {
    const bool interior = h > 0 && w > 0 && h + 1 < height && w + 1 < width;
    if (policy == BorderPolicy::SkipBorder && !interior) return {h, h, w, w, false};
    return {std::min(h + 1, height - 1), h > 0 ? h - 1 : 0, std::min(w + 1, width - 1),
            w > 0 ? w - 1 : 0, true};
}

inline void check_image(const RealGrid& g) {
    if (g.height() < kMinImageSide || g.width() < kMinImageSide) {
        throw InvalidImage("central differences need at least 3x3 pixels");
    }
}

} // namespace detail

inline CentralDifferences central_differences(const RealGrid& img, BorderPolicy policy) {
    detail::check_image(img);
    const std::size_t H = img.height(), W = img.width();
    CentralDifferences d{RealGrid(H, W), RealGrid(H, W)};
    for (std::size_t h = 0; h < H; ++h) {
        for (std::size_t w = 0; w < W; ++w) {
            const auto s = detail::stencil(h, w, H, W, policy);
            if (!s.valid) continue;
            d.vertical(h, w) = img(s.up, w) - img(s.down, w);
            d.horizontal(h, w) = img(h, s.right) - img(h, s.left);
        }
    }
    return d;
}

inline CentralDifferences central_differences(const GrayImage& img, BorderPolicy policy) {
    return central_differences(img.pixels(), policy);
}

/// Single-argument arctangent of vertical / (horizontal + eps): direction is
/// taken modulo pi.
inline double direction_angle(double vertical, double horizontal, double epsilon) noexcept {
    // 0/0 when horizontal == -epsilon exactly; a flat stencil has angle 0.
    if (vertical == 0.0) return 0.0;
    return std::atan(vertical / (horizontal + epsilon));
}

/// Gradient direction map of a raw grid. Used on optimizer iterates whose
/// pixels are already known to be in range.
inline RealGrid direction_angles(const RealGrid& img, const GdmConfig& cfg) {
    detail::check_image(img);
    const std::size_t H = img.height(), W = img.width();
    RealGrid angles(H, W);
    for (std::size_t h = 0; h < H; ++h) {
        for (std::size_t w = 0; w < W; ++w) {
            const auto s = detail::stencil(h, w, H, W, cfg.border);
            const double v = s.valid ? img(s.up, w) - img(s.down, w) : 0.0;
            const double hz = s.valid ? img(h, s.right) - img(h, s.left) : 0.0;
            angles(h, w) = direction_angle(v, hz, cfg.epsilon);
        }
    }
    return angles;
}

inline GradientDirectionMap gdm(const GrayImage& img, const GdmConfig& cfg = {}) {
    cfg.validate();
    return GradientDirectionMap(direction_angles(img.pixels(), cfg), cfg.epsilon);
}

struct Residual {
    double norm = 0.0;          // Frobenius norm of the angle difference
    double mean_abs = 0.0;      // mean |difference|, radians
    double max_abs = 0.0;
};

/// Raw (not wrap-aware) elementwise difference between two maps.
inline Residual gdm_residual(const RealGrid& a, const RealGrid& b) {
    require_same_shape(a, b, "gdm_residual");
    Residual r;
    if (a.empty()) return r;
    double sq = 0.0, abs_sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sq += d * d;
        abs_sum += std::abs(d);
        r.max_abs = std::max(r.max_abs, std::abs(d));
    }
    r.norm = std::sqrt(sq);
    r.mean_abs = abs_sum / static_cast<double>(a.size());
    return r;
}

inline Residual gdm_residual(const GradientDirectionMap& a, const GradientDirectionMap& b) {
    return gdm_residual(a.angles(), b.angles());
}

} // namespace gradpres
