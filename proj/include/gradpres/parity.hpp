#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "generator.hpp"
#include "hog.hpp"
#include "parallel.hpp"
#include "svm.hpp"
#include "synth.hpp"

namespace gradpres {

/// Feature pipelines compared in a parity run.
enum class Pipeline {
    Proposed, // protect, then magnitude-free HOG of the protected image
    Plain,    // magnitude-free HOG of the original
    Weighted, // magnitude-weighted HOG of the original
    Pixels,   // raw pixel values of the original
};

inline std::string_view pipeline_name(Pipeline p) {
    switch (p) {
    case Pipeline::Proposed: return "proposed";
    case Pipeline::Plain: return "plain";
    case Pipeline::Weighted: return "weighted";
    case Pipeline::Pixels: return "pixels";
    }
    return "?";
}

inline Pipeline parse_pipeline(std::string_view name) {
    for (auto p : {Pipeline::Proposed, Pipeline::Plain, Pipeline::Weighted, Pipeline::Pixels}) {
        if (pipeline_name(p) == name) return p;
    }
    throw InvalidArgument("unknown pipeline '" + std::string(name) + "'");
}

struct ParityConfig {
    std::vector<Pipeline> pipelines{Pipeline::Proposed, Pipeline::Plain, Pipeline::Weighted};
    std::vector<std::uint64_t> seeds{0};
    SvmParams svm;             // svm.seed is replaced by each run seed
    HogConfig hog;             // weighting is set per pipeline
    GdmConfig gdm;
    OptimizerConfig protect;   // image i is protected with seed protect.seed + i
    bool quantize = false;     // round protected images to 8 bits before HOG
    unsigned jobs = 1;
};

/// Summary of the protection step over a dataset.
struct ProtectionStats {
    std::size_t images = 0;
    double mean_abs_residual = 0.0; // mean over images of the raw mean |dtheta|
    double max_mean_abs_residual = 0.0;
    double mean_iterations = 0.0;
};

inline GrayImage quantize_8bit(const GrayImage& img) {
    RealGrid q = img.pixels();
    for (double& v : q) v = std::clamp(std::round(v * 255.0), 0.0, 255.0) / 255.0;
    return GrayImage(std::move(q));
}

/// Protected versions of `images`, one optimizer run per image.
inline std::vector<ProtectedImage> protect_all(const std::vector<LabeledImage>& images,
                                               const OptimizerConfig& opt, const GdmConfig& cfg,
                                               unsigned jobs = 1) {
    std::vector<ProtectedImage> out(images.size());
    parallel_for(images.size(), jobs, [&](std::size_t i) {
        OptimizerConfig o = opt;
        o.seed = opt.seed + i;
        out[i] = generate_protected(images[i].image, o, cfg);
    });
    return out;
}

inline LabeledFeatureSet build_features(const std::vector<LabeledImage>& images, int classes,
                                        Pipeline pipeline, const ParityConfig& cfg,
                                        ProtectionStats* stats = nullptr) {
    LabeledFeatureSet set;
    set.classes = classes;
    set.features.resize(images.size());
    set.labels.reserve(images.size());
    for (const auto& li : images) set.labels.push_back(li.label);

    HogConfig hog = cfg.hog;
    hog.weighting = pipeline == Pipeline::Weighted ? HogWeighting::MagnitudeWeighted
                                                   : HogWeighting::Unweighted;
    if (pipeline == Pipeline::Proposed) {
        std::vector<double> residuals(images.size());
        std::vector<int> iterations(images.size());
        parallel_for(images.size(), cfg.jobs, [&](std::size_t i) {
            OptimizerConfig o = cfg.protect;
            o.seed = cfg.protect.seed + i;
            auto prot = generate_protected(images[i].image, o, cfg.gdm);
            residuals[i] = prot.report.final_residual.mean_abs;
            iterations[i] = prot.report.iterations;
            const GrayImage& x = cfg.quantize ? quantize_8bit(prot.image) : prot.image;
            set.features[i] = extract_hog(x, hog, cfg.gdm);
        });
        if (stats) {
            *stats = {};
            stats->images = images.size();
            for (std::size_t i = 0; i < images.size(); ++i) {
                stats->mean_abs_residual += residuals[i];
                stats->max_mean_abs_residual = std::max(stats->max_mean_abs_residual, residuals[i]);
                stats->mean_iterations += iterations[i];
            }
            if (!images.empty()) {
                stats->mean_abs_residual /= double(images.size());
                stats->mean_iterations /= double(images.size());
            }
        }
    } else {
        parallel_for(images.size(), cfg.jobs, [&](std::size_t i) {
            if (pipeline == Pipeline::Pixels) {
                set.features[i] = images[i].image.pixels().vector();
            } else {
                set.features[i] = extract_hog(images[i].image, hog, cfg.gdm);
            }
        });
    }
    set.validate();
    return set;
}

struct ParityRow {
    Pipeline pipeline;
    std::uint64_t seed = 0;
    Evaluation evaluation;
    std::size_t n_train = 0, n_test = 0;
};

struct ParitySummary {
    Pipeline pipeline;
    double mean = 0.0;
    double stddev = 0.0; // population standard deviation over seeds
    std::size_t runs = 0;
};

struct ParityReport {
    std::vector<ParityRow> rows;
    std::vector<ParitySummary> summary;
    std::map<Pipeline, ProtectionStats> protection;
    std::map<Pipeline, LabeledFeatureSet> features; // one entry per distinct pipeline
    ParityConfig config;
};

/// Split, train and evaluate one feature set for one seed.
inline ParityRow run_split(const LabeledFeatureSet& set, Pipeline pipeline, std::uint64_t seed,
                           SvmParams svm) {
    auto [train, test] = split_half(set, seed);
    svm.seed = seed;
    const auto model = train_svm(train, svm);
    return {pipeline, seed, evaluate(model, test), train.size(), test.size()};
}

/// For each pipeline: build features once, then split/train/evaluate per
/// seed. Rows are ordered pipeline-major, seed-minor, in the order given.
inline ParityReport parity_report(const std::vector<LabeledImage>& images, int classes,
                                  const ParityConfig& cfg) {
    if (cfg.pipelines.empty()) throw InvalidArgument("parity_report: no pipelines");
    if (cfg.seeds.empty()) throw InvalidArgument("parity_report: no seeds");
    ParityReport report;
    report.config = cfg;
    std::map<Pipeline, LabeledFeatureSet> cache;
    for (Pipeline p : cfg.pipelines) {
        auto it = cache.find(p);
        if (it == cache.end()) {
            ProtectionStats stats;
            it = cache.emplace(p, build_features(images, classes, p, cfg, &stats)).first;
            if (p == Pipeline::Proposed) report.protection[p] = stats;
        }
        ParitySummary sum{p, 0.0, 0.0, cfg.seeds.size()};
        std::vector<double> acc;
        for (std::uint64_t seed : cfg.seeds) {
            report.rows.push_back(run_split(it->second, p, seed, cfg.svm));
            acc.push_back(report.rows.back().evaluation.accuracy);
        }
        for (double a : acc) sum.mean += a;
        sum.mean /= double(acc.size());
        for (double a : acc) sum.stddev += (a - sum.mean) * (a - sum.mean);
        sum.stddev = std::sqrt(sum.stddev / double(acc.size()));
        report.summary.push_back(sum);
    }
    report.features = std::move(cache);
    return report;
}

inline std::string format_table(const ParityReport& report) {
    std::string out = "pipeline    accuracy (mean +- std)   runs\n";
    char line[128];
    for (const auto& s : report.summary) {
        std::snprintf(line, sizeof line, "%-10s  %.4f +- %.4f          %zu\n",
                      std::string(pipeline_name(s.pipeline)).c_str(), s.mean, s.stddev, s.runs);
        out += line;
    }
    return out;
}

} // namespace gradpres
