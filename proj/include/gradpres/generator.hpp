#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "gdm.hpp"

namespace gradpres {

/// Unconstrained latent grid s; the protected image is sigmoid(s).
class LatentField {
public:
    LatentField() = default;
    explicit LatentField(RealGrid values) : values_(std::move(values)) {
        for (double v : values_) {
            if (!std::isfinite(v)) throw InvalidLatent("latent field contains a non-finite value");
        }
    }

    std::size_t height() const noexcept { return values_.height(); }
    std::size_t width() const noexcept { return values_.width(); }
    double operator()(std::size_t h, std::size_t w) const { return values_(h, w); }
    const RealGrid& values() const noexcept { return values_; }

    friend bool operator==(const LatentField&, const LatentField&) = default;

private:
    RealGrid values_;
};

enum class LineSearch { Fixed, Backtracking };

/// How the optimizer compares target and current angles. Raw is the plain
/// difference. Wrapped reduces it modulo pi into [-pi/2, pi/2], which treats
/// -pi/2 + d and pi/2 - d as neighbours and removes the jump that the
/// single-argument arctangent makes where horizontal + epsilon changes sign.
enum class AngleMetric { Raw, Wrapped };

inline double angle_difference(double target, double current, AngleMetric metric) noexcept {
    const double d = target - current;
    if (metric == AngleMetric::Raw) return d;
    return d - std::numbers::pi * std::round(d / std::numbers::pi);
}

struct OptimizerConfig {
    std::uint64_t seed = 0;
    double init_scale = 0.1;
    double learning_rate = 0.003;
    int max_iters = 2000;
    double tolerance = 1e-3;          // on the unsquared residual norm
    bool use_squared_objective = true;
    LineSearch line_search = LineSearch::Backtracking;
    AngleMetric angle_metric = AngleMetric::Wrapped;
    double min_step = 1e-8;           // backtracking floor

    void validate() const {
        if (!(learning_rate > 0.0)) throw InvalidArgument("learning_rate must be > 0");
        if (max_iters < 1) throw InvalidArgument("max_iters must be >= 1");
        if (!(init_scale >= 0.0) || !std::isfinite(init_scale))
            throw InvalidArgument("init_scale must be finite and >= 0");
        if (!(tolerance >= 0.0)) throw InvalidArgument("tolerance must be >= 0");
        if (!(min_step > 0.0)) throw InvalidArgument("min_step must be > 0");
    }
};

inline double sigmoid(double s) noexcept {
    // Split form keeps exp() from overflowing for large |s|.
    if (s >= 0.0) return 1.0 / (1.0 + std::exp(-s));
    const double e = std::exp(s);
    return e / (1.0 + e);
}

namespace detail {

inline RealGrid sigmoid_grid(const RealGrid& s) {
    RealGrid out(s.height(), s.width());
    for (std::size_t i = 0; i < s.size(); ++i) out[i] = sigmoid(s[i]);
    return out;
}

} // namespace detail

/// Elementwise logistic map. Saturates to exactly 0 or 1 only for |s| > ~37,
/// where the double result rounds; the [0,1] image invariant still holds.
inline GrayImage sigmoid_map(const LatentField& s) {
    for (double v : s.values()) {
        if (!std::isfinite(v)) throw InvalidLatent("latent field contains a non-finite value");
    }
    return GrayImage(detail::sigmoid_grid(s.values()));
}

/// i.i.d. uniform draws on [-init_scale, init_scale] from a seeded mt19937_64.
inline LatentField init_latent(std::size_t height, std::size_t width, std::uint64_t seed,
                               double init_scale) {
    if (height < kMinImageSide || width < kMinImageSide) {
        throw InvalidImage("latent field must be at least 3x3");
    }
    if (!(init_scale >= 0.0) || !std::isfinite(init_scale)) {
        throw InvalidArgument("init_scale must be finite and >= 0");
    }
    RealGrid values(height, width, 0.0);
    if (init_scale > 0.0) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> dist(-init_scale, init_scale);
        for (double& v : values) v = dist(rng);
    }
    return LatentField(std::move(values));
}

namespace detail {

inline double squared_residual(const RealGrid& target, const RealGrid& s, const GdmConfig& cfg,
                               AngleMetric metric) {
    const RealGrid x = sigmoid_grid(s);
    const std::size_t H = x.height(), W = x.width();
    double sq = 0.0;
    for (std::size_t h = 0; h < H; ++h) {
        for (std::size_t w = 0; w < W; ++w) {
            const auto st = stencil(h, w, H, W, cfg.border);
            const double v = st.valid ? x(st.up, w) - x(st.down, w) : 0.0;
            const double hz = st.valid ? x(h, st.right) - x(h, st.left) : 0.0;
            const double d =
                angle_difference(target(h, w), direction_angle(v, hz, cfg.epsilon), metric);
            sq += d * d;
        }
    }
    return sq;
}

/// Gradient of sum((target - theta(sigmoid(s)))^2) with respect to s.
inline RealGrid squared_residual_gradient(const RealGrid& target, const RealGrid& s,
                                          const GdmConfig& cfg, AngleMetric metric) {
    const std::size_t H = s.height(), W = s.width();
    const RealGrid x = sigmoid_grid(s);
    RealGrid gx(H, W, 0.0);
    for (std::size_t h = 0; h < H; ++h) {
        for (std::size_t w = 0; w < W; ++w) {
            const auto st = stencil(h, w, H, W, cfg.border);
            if (!st.valid) continue;
            const double v = x(st.up, w) - x(st.down, w);
            const double hz = x(h, st.right) - x(h, st.left);
            const double a = hz + cfg.epsilon;
            const double den = a * a + v * v;
            if (den == 0.0) continue;
            const double r =
                angle_difference(target(h, w), direction_angle(v, hz, cfg.epsilon), metric);
            // d(r^2)/d(theta) = -2r; d(theta)/dV = a/den, d(theta)/dH = -v/den
            const double dv = -2.0 * r * a / den;
            const double dh = 2.0 * r * v / den;
            gx(st.up, w) += dv;
            gx(st.down, w) -= dv;
            gx(h, st.right) += dh;
            gx(h, st.left) -= dh;
        }
    }
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] *= x[i] * (1.0 - x[i]);
    return gx;
}

} // namespace detail

/// Residual norm between `target` and the GDM of sigmoid(s); squared when
/// `squared` is set.
inline double objective(const GradientDirectionMap& target, const LatentField& s,
                        const GdmConfig& cfg, bool squared,
                        AngleMetric metric = AngleMetric::Raw) {
    cfg.validate();
    require_same_shape(target.angles(), s.values(), "objective");
    const double sq = detail::squared_residual(target.angles(), s.values(), cfg, metric);
    return squared ? sq : std::sqrt(sq);
}

/// Analytic gradient of the squared objective with respect to s.
///
/// Per pixel, with V and H the vertical and horizontal differences of
/// x' = sigmoid(s), a = H + eps, D = a^2 + V^2 and r the angle residual,
/// -2r is pushed to the four stencil neighbours through
///   d(theta)/dx'(h+1,w) =  a/D,  d(theta)/dx'(h-1,w) = -a/D,
///   d(theta)/dx'(h,w+1) = -V/D,  d(theta)/dx'(h,w-1) =  V/D,
/// and the result is scaled by sigmoid'(s) = x'(1 - x'). Neighbour indices
/// follow the border policy; SkipBorder pixels contribute nothing.
inline RealGrid objective_gradient(const GradientDirectionMap& target, const LatentField& s,
                                   const GdmConfig& cfg, AngleMetric metric = AngleMetric::Raw) {
    cfg.validate();
    require_same_shape(target.angles(), s.values(), "objective_gradient");
    return detail::squared_residual_gradient(target.angles(), s.values(), cfg, metric);
}

struct ConvergenceReport {
    int iterations = 0;                  // accepted descent steps
    double initial_objective = 0.0;      // unsquared norm at the starting point
    double final_objective = 0.0;        // unsquared norm at the returned point
    std::vector<double> objective_trace; // unsquared norm, entry t after t steps
    Residual final_residual;             // raw GDM(x) vs GDM(x'), before quantization
    bool converged = false;              // final_objective <= tolerance
    bool stalled = false;                // backtracking hit the step floor
    std::uint64_t seed = 0;
    OptimizerConfig optimizer;
    GdmConfig gdm;
};

struct ProtectedImage {
    GrayImage image;
    LatentField latent;
    ConvergenceReport report;
};

/// Steepest descent on s from a seeded random start. Backtracking halves the
/// step from `learning_rate` until the objective strictly decreases; if the
/// step drops below `min_step` the run stops with `stalled` set and the last
/// accepted iterate is returned, so the trace is non-increasing.
inline ProtectedImage generate_protected(const GrayImage& x, const OptimizerConfig& opt = {},
                                         const GdmConfig& cfg = {}) {
    opt.validate();
    cfg.validate();
    const RealGrid target = gdm(x, cfg).angles();
    const auto f = [&](const RealGrid& s) {
        return detail::squared_residual(target, s, cfg, opt.angle_metric);
    };

    RealGrid s = init_latent(x.height(), x.width(), opt.seed, opt.init_scale).values();
    ConvergenceReport rep;
    rep.seed = opt.seed;
    rep.optimizer = opt;
    rep.gdm = cfg;

    double fs = f(s);
    rep.initial_objective = std::sqrt(fs);
    rep.objective_trace.push_back(rep.initial_objective);
    RealGrid trial(s.height(), s.width());

    for (int it = 0; it < opt.max_iters && std::sqrt(fs) > opt.tolerance; ++it) {
        RealGrid g = detail::squared_residual_gradient(target, s, cfg, opt.angle_metric);
        if (!opt.use_squared_objective) {
            // d||r|| = d(||r||^2) / (2 ||r||)
            const double scale = 0.5 / std::sqrt(fs);
            for (double& v : g) v *= scale;
        }

        double step = opt.learning_rate;
        double ft = 0.0;
        bool accepted = false;
        for (;;) {
            for (std::size_t i = 0; i < s.size(); ++i) trial[i] = s[i] - step * g[i];
            ft = f(trial);
            if (opt.line_search == LineSearch::Fixed || ft < fs) {
                accepted = std::isfinite(ft);
                break;
            }
            step *= 0.5;
            if (step < opt.min_step) break;
        }
        if (!accepted) {
            rep.stalled = true;
            break;
        }
        std::swap(s, trial);
        fs = ft;
        ++rep.iterations;
        rep.objective_trace.push_back(std::sqrt(fs));
    }

    rep.final_objective = std::sqrt(fs);
    rep.converged = rep.final_objective <= opt.tolerance;
    LatentField latent(std::move(s));
    GrayImage image = sigmoid_map(latent);
    rep.final_residual = gdm_residual(target, gdm(image, cfg).angles());
    return {std::move(image), std::move(latent), std::move(rep)};
}

} // namespace gradpres
