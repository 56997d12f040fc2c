#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "gdm.hpp"

namespace gradpres {

enum class HogWeighting {
    Unweighted,        // every pixel votes 1; the only option for protected images
    MagnitudeWeighted, // votes weighted by central-difference magnitude
};

struct HogConfig {
    std::size_t cell_size = 8;
    std::size_t bins = 9;
    HogWeighting weighting = HogWeighting::Unweighted;

    static constexpr std::size_t block_cells = 2; // blocks are 2x2 histograms

    std::size_t block_length() const noexcept { return block_cells * block_cells * bins; }

    void validate() const {
        if (cell_size < 1) throw InvalidArgument("HogConfig.cell_size must be >= 1");
        if (bins < 2) throw InvalidArgument("HogConfig.bins must be >= 2");
    }
};

/// rows x cols grid of b-bin histograms, stored contiguously per cell.
class CellHistogramGrid {
public:
    CellHistogramGrid(std::size_t rows, std::size_t cols, std::size_t bins)
        : rows_(rows), cols_(cols), bins_(bins), data_(rows * cols * bins, 0.0) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t bins() const noexcept { return bins_; }

    std::span<double> histogram(std::size_t i, std::size_t j) {
        return {data_.data() + (i * cols_ + j) * bins_, bins_};
    }
    std::span<const double> histogram(std::size_t i, std::size_t j) const {
        return {data_.data() + (i * cols_ + j) * bins_, bins_};
    }

    friend bool operator==(const CellHistogramGrid&, const CellHistogramGrid&) = default;

private:
    std::size_t rows_, cols_, bins_;
    std::vector<double> data_;
};

using HogVector = std::vector<double>;

/// Bin k covers [-pi/2 + k*pi/b, -pi/2 + (k+1)*pi/b): an angle on an edge
/// goes to the higher bin. Out-of-range values clamp to the end bins.
inline std::size_t orientation_bin(double angle, std::size_t bins) noexcept {
    const double t = (angle + std::numbers::pi / 2) * static_cast<double>(bins) / std::numbers::pi;
    if (!(t > 0.0)) return 0;
    return std::min(static_cast<std::size_t>(t), bins - 1);
}

/// Length of the descriptor for an H x W image (after cropping to cell
/// multiples). Zero when fewer than 2x2 cells fit.
inline std::size_t hog_length(std::size_t height, std::size_t width, const HogConfig& cfg) {
    const std::size_t rows = height / cfg.cell_size, cols = width / cfg.cell_size;
    if (rows < 2 || cols < 2) return 0;
    return (rows - 1) * (cols - 1) * cfg.block_length();
}

/// Histograms of a direction map over non-overlapping cells. `magnitude` must
/// be given exactly when cfg.weighting is MagnitudeWeighted.
inline CellHistogramGrid cell_histograms(const RealGrid& angles, const HogConfig& cfg,
                                         const RealGrid* magnitude = nullptr) {
    cfg.validate();
    const std::size_t n = cfg.cell_size;
    if (angles.height() % n != 0 || angles.width() % n != 0) {
        throw ShapeMismatch("direction map " + std::to_string(angles.height()) + "x" +
                            std::to_string(angles.width()) + " not divisible by cell size " +
                            std::to_string(n));
    }
    const bool weighted = cfg.weighting == HogWeighting::MagnitudeWeighted;
    if (weighted != (magnitude != nullptr)) {
        throw InvalidArgument("magnitude grid required iff weighting is MagnitudeWeighted");
    }
    if (magnitude) require_same_shape(angles, *magnitude, "cell_histograms");

    CellHistogramGrid grid(angles.height() / n, angles.width() / n, cfg.bins);
    for (std::size_t h = 0; h < angles.height(); ++h) {
        for (std::size_t w = 0; w < angles.width(); ++w) {
            auto hist = grid.histogram(h / n, w / n);
            hist[orientation_bin(angles(h, w), cfg.bins)] += weighted ? (*magnitude)(h, w) : 1.0;
        }
    }
    return grid;
}

inline CellHistogramGrid cell_histograms(const GradientDirectionMap& map, const HogConfig& cfg,
                                         const RealGrid* magnitude = nullptr) {
    return cell_histograms(map.angles(), cfg, magnitude);
}

/// Raw blocks B(i,j) = h(i,j) ++ h(i+1,j) ++ h(i,j+1) ++ h(i+1,j+1), one per
/// (i, j) in row-major order, overlapping with a stride of one cell.
inline std::vector<std::vector<double>> assemble_blocks(const CellHistogramGrid& grid) {
    if (grid.rows() < 2 || grid.cols() < 2) {
        throw ShapeMismatch("block assembly needs at least 2x2 cells");
    }
    std::vector<std::vector<double>> blocks;
    blocks.reserve((grid.rows() - 1) * (grid.cols() - 1));
    for (std::size_t i = 0; i + 1 < grid.rows(); ++i) {
        for (std::size_t j = 0; j + 1 < grid.cols(); ++j) {
            std::vector<double> block;
            block.reserve(4 * grid.bins());
            for (auto [di, dj] : {std::pair{0, 0}, {1, 0}, {0, 1}, {1, 1}}) {
                auto hist = grid.histogram(i + di, j + dj);
                block.insert(block.end(), hist.begin(), hist.end());
            }
            blocks.push_back(std::move(block));
        }
    }
    return blocks;
}

/// L2 normalization; an all-zero block stays zero.
inline std::vector<double> normalize_block(std::span<const double> block) {
    double sq = 0.0;
    for (double v : block) sq += v * v;
    std::vector<double> out(block.begin(), block.end());
    if (sq == 0.0) return out;
    const double norm = std::sqrt(sq);
    for (double& v : out) v /= norm;
    return out;
}

/// Drops bottom rows and right columns so both sides are multiples of `cell`.
inline RealGrid crop_to_multiple(const RealGrid& g, std::size_t cell) {
    const std::size_t H = g.height() / cell * cell, W = g.width() / cell * cell;
    if (H == g.height() && W == g.width()) return g;
    RealGrid out(H, W);
    for (std::size_t h = 0; h < H; ++h)
        for (std::size_t w = 0; w < W; ++w) out(h, w) = g(h, w);
    return out;
}

/// Full descriptor: GDM, cell histograms, 2x2 blocks, per-block L2
/// normalization, concatenation. The image is cropped at the bottom/right to
/// a multiple of the cell size before the GDM is taken.
inline HogVector extract_hog(const GrayImage& img, const HogConfig& hog_cfg = {},
                             const GdmConfig& gdm_cfg = {}) {
    hog_cfg.validate();
    gdm_cfg.validate();
    if (img.height() / hog_cfg.cell_size < 2 || img.width() / hog_cfg.cell_size < 2) {
        throw ShapeMismatch("image " + std::to_string(img.height()) + "x" +
                            std::to_string(img.width()) + " smaller than 2x2 cells of " +
                            std::to_string(hog_cfg.cell_size));
    }
    const RealGrid pixels = crop_to_multiple(img.pixels(), hog_cfg.cell_size);
    const RealGrid angles = direction_angles(pixels, gdm_cfg);

    std::optional<RealGrid> magnitude;
    if (hog_cfg.weighting == HogWeighting::MagnitudeWeighted) {
        const auto d = central_differences(pixels, gdm_cfg.border);
        magnitude.emplace(pixels.height(), pixels.width());
        for (std::size_t i = 0; i < pixels.size(); ++i) {
            (*magnitude)[i] = std::hypot(d.vertical[i], d.horizontal[i]);
        }
    }

    const auto grid = cell_histograms(angles, hog_cfg, magnitude ? &*magnitude : nullptr);
    HogVector out;
    out.reserve(hog_length(pixels.height(), pixels.width(), hog_cfg));
    for (const auto& block : assemble_blocks(grid)) {
        const auto normalized = normalize_block(block);
        out.insert(out.end(), normalized.begin(), normalized.end());
    }
    return out;
}

inline double cosine_similarity(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ShapeMismatch("cosine_similarity: length mismatch");
    double ab = 0.0, aa = 0.0, bb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ab += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    if (aa == 0.0 || bb == 0.0) return aa == bb ? 1.0 : 0.0;
    return ab / std::sqrt(aa * bb);
}

} // namespace gradpres
