#pragma once

#include <cmath>
#include <filesystem>
#include <numbers>
#include <vector>

#include "gdm.hpp"
#include "image_io.hpp"

namespace gradpres {

/// 8-bit rendering of a direction map: (-pi/2, pi/2) maps affinely onto
/// [0, 255], so angle 0 becomes 128.
inline std::vector<std::uint8_t> render_gdm(const GradientDirectionMap& map) {
    std::vector<std::uint8_t> out(map.angles().size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = to_byte((map.angles()[i] + std::numbers::pi / 2) / std::numbers::pi);
    }
    return out;
}

inline std::vector<std::uint8_t> render_image(const GrayImage& img) {
    return detail::to_bytes(img.pixels());
}

inline void save_gdm(const GradientDirectionMap& map, const std::filesystem::path& path) {
    save_bytes(path, map.height(), map.width(), render_gdm(map));
}

/// Side-by-side panels of equal height separated by a 4-pixel white gutter.
inline void save_panels(const std::vector<std::vector<std::uint8_t>>& panels, std::size_t height,
                        const std::vector<std::size_t>& widths, const std::filesystem::path& path) {
    constexpr std::size_t gutter = 4;
    std::size_t total = 0;
    for (std::size_t w : widths) total += w;
    total += gutter * (widths.size() - 1);
    std::vector<std::uint8_t> canvas(height * total, 255);
    std::size_t x0 = 0;
    for (std::size_t p = 0; p < panels.size(); ++p) {
        for (std::size_t h = 0; h < height; ++h)
            for (std::size_t w = 0; w < widths[p]; ++w)
                canvas[h * total + x0 + w] = panels[p][h * widths[p] + w];
        x0 += widths[p] + gutter;
    }
    save_bytes(path, height, total, canvas);
}

/// Original, protected image, and the protected image's direction map.
inline void save_protection_panel(const GrayImage& original, const GrayImage& protected_img,
                                  const GdmConfig& cfg, const std::filesystem::path& path) {
    require_same_shape(original.pixels(), protected_img.pixels(), "save_protection_panel");
    const std::size_t w = original.width();
    save_panels({render_image(original), render_image(protected_img),
                 render_gdm(gdm(protected_img, cfg))},
                original.height(), {w, w, w}, path);
}

/// Mean SSIM over all 7x7 windows with uniform weights, dynamic range 1.
/// Diagnostic only.
inline double ssim(const GrayImage& a, const GrayImage& b) {
    require_same_shape(a.pixels(), b.pixels(), "ssim");
    constexpr std::size_t win = 7;
    constexpr double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
    const std::size_t H = a.height(), W = a.width();
    const std::size_t wh = std::min(win, H), ww = std::min(win, W);
    const double n = double(wh * ww);
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t h0 = 0; h0 + wh <= H; ++h0) {
        for (std::size_t w0 = 0; w0 + ww <= W; ++w0) {
            double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
            for (std::size_t h = h0; h < h0 + wh; ++h) {
                for (std::size_t w = w0; w < w0 + ww; ++w) {
                    const double x = a(h, w), y = b(h, w);
                    sa += x;
                    sb += y;
                    saa += x * x;
                    sbb += y * y;
                    sab += x * y;
                }
            }
            const double ma = sa / n, mb = sb / n;
            const double va = saa / n - ma * ma, vb = sbb / n - mb * mb, cov = sab / n - ma * mb;
            total += ((2 * ma * mb + c1) * (2 * cov + c2)) /
                     ((ma * ma + mb * mb + c1) * (va + vb + c2));
            ++count;
        }
    }
    return total / double(count);
}

} // namespace gradpres
