#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "error.hpp"

namespace gradpres {

struct LabeledFeatureSet {
    std::vector<std::vector<double>> features;
    std::vector<int> labels;
    int classes = 0;

    std::size_t size() const noexcept { return labels.size(); }
    std::size_t dimension() const noexcept { return features.empty() ? 0 : features[0].size(); }

    /// Enforces equal lengths, labels in [0, K), and (optionally) that every
    /// class has at least one sample.
    void validate(bool require_all_classes = true) const {
        if (features.size() != labels.size()) {
            throw ShapeMismatch("feature/label count mismatch");
        }
        if (classes < 1) throw InsufficientData("feature set has no classes");
        const std::size_t dim = dimension();
        std::vector<int> counts(std::size_t(classes), 0);
        for (std::size_t i = 0; i < size(); ++i) {
            if (features[i].size() != dim) throw ShapeMismatch("ragged feature vectors");
            if (labels[i] < 0 || labels[i] >= classes) {
                throw InvalidArgument("label " + std::to_string(labels[i]) + " outside [0, " +
                                      std::to_string(classes) + ")");
            }
            ++counts[std::size_t(labels[i])];
        }
        if (require_all_classes) {
            for (int k = 0; k < classes; ++k) {
                if (counts[std::size_t(k)] == 0) {
                    throw InsufficientData("class " + std::to_string(k) + " has no samples");
                }
            }
        }
    }

    std::vector<int> class_counts() const {
        std::vector<int> counts(std::size_t(classes), 0);
        for (int y : labels) ++counts[std::size_t(y)];
        return counts;
    }
};

/// Stratified half split: each class is shuffled and its first ceil(n/2)
/// samples go to training.
inline std::pair<LabeledFeatureSet, LabeledFeatureSet> split_half(const LabeledFeatureSet& set,
                                                                  std::uint64_t seed) {
    set.validate();
    std::vector<std::vector<std::size_t>> by_class(std::size_t(set.classes));
    for (std::size_t i = 0; i < set.size(); ++i) by_class[std::size_t(set.labels[i])].push_back(i);

    LabeledFeatureSet train{{}, {}, set.classes}, test{{}, {}, set.classes};
    std::mt19937_64 rng(seed);
    for (int k = 0; k < set.classes; ++k) {
        auto& idx = by_class[std::size_t(k)];
        if (idx.size() < 2) {
            throw InsufficientData("class " + std::to_string(k) + " has " +
                                   std::to_string(idx.size()) + " sample(s), need 2");
        }
        std::shuffle(idx.begin(), idx.end(), rng);
        const std::size_t n_train = (idx.size() + 1) / 2;
        for (std::size_t n = 0; n < idx.size(); ++n) {
            auto& dst = n < n_train ? train : test;
            dst.features.push_back(set.features[idx[n]]);
            dst.labels.push_back(k);
        }
    }
    return {std::move(train), std::move(test)};
}

struct SvmParams {
    double lambda = 1e-4;
    int epochs = 50;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(lambda > 0.0)) throw InvalidArgument("svm lambda must be > 0");
        if (epochs < 1) throw InvalidArgument("svm epochs must be >= 1");
    }
};

struct SvmModel {
    std::vector<std::vector<double>> weights; // K x D
    std::vector<double> biases;               // K
    SvmParams params;
    /// Per class, the primal objective lambda/2 |w|^2 + mean hinge of the averaged
    /// hyperplane after each epoch.
    std::vector<std::vector<double>> objective_trace;

    int classes() const noexcept { return int(weights.size()); }
    std::size_t dimension() const noexcept { return weights.empty() ? 0 : weights[0].size(); }

    double score(int k, std::span<const double> f) const {
        const auto& w = weights[std::size_t(k)];
        double s = biases[std::size_t(k)];
        for (std::size_t d = 0; d < w.size(); ++d) s += w[d] * f[d];
        return s;
    }

    /// Highest-scoring class; ties go to the lowest id.
    int predict(std::span<const double> f) const {
        if (f.size() != dimension()) throw ShapeMismatch("feature dimension does not match model");
        int best = 0;
        double best_score = score(0, f);
        for (int k = 1; k < classes(); ++k) {
            const double s = score(k, f);
            if (s > best_score) {
                best = k;
                best_score = s;
            }
        }
        return best;
    }
};

namespace detail {

/// Binary hinge-loss SVM by stochastic subgradient descent with step
/// 1/(lambda t). The bias rides along as a constant feature of value 1 and is
/// regularized with the weights. The weight vector is stored as scale * v so
/// the shrink step costs O(1).
///
/// The returned hyperplane is the mean of all iterates weighted by t. The
/// last iterate keeps jittering by O(1/(lambda t)) around the optimum, while a
/// uniform mean stays dominated by the large early iterates; weighting by t
/// settles the per-epoch objective without that bias.
inline void train_binary(const LabeledFeatureSet& set, int positive, const SvmParams& p,
                         std::vector<double>& w_out, double& b_out, std::vector<double>& trace) {
    const std::size_t n = set.size(), dim = set.dimension();
    std::vector<double> v(dim + 1, 0.0), mean(dim + 1, 0.0);
    double scale = 1.0;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(p.seed ^ (0x9E3779B97F4A7C15ULL * std::uint64_t(positive + 1)));

    const auto margin = [&](std::size_t i) {
        const auto& f = set.features[i];
        double s = v[dim];
        for (std::size_t d = 0; d < dim; ++d) s += v[d] * f[d];
        return scale * s;
    };

    std::uint64_t t = 0;
    for (int epoch = 0; epoch < p.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t i : order) {
            ++t;
            const double y = set.labels[i] == positive ? 1.0 : -1.0;
            const double eta = 1.0 / (p.lambda * double(t));
            const double m = y * margin(i);
            const double shrink = 1.0 - eta * p.lambda;
            if (shrink <= 0.0) {
                std::fill(v.begin(), v.end(), 0.0);
                scale = 1.0;
            } else {
                scale *= shrink;
            }
            if (m < 1.0) {
                const double c = eta * y / scale;
                const auto& f = set.features[i];
                for (std::size_t d = 0; d < dim; ++d) v[d] += c * f[d];
                v[dim] += c;
            }
            if (scale < 1e-9) {
                for (double& x : v) x *= scale;
                scale = 1.0;
            }
            const double rate = 2.0 / double(t + 1);
            for (std::size_t d = 0; d <= dim; ++d) mean[d] += (scale * v[d] - mean[d]) * rate;
        }

        double sq = 0.0;
        for (double x : mean) sq += x * x;
        double hinge = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double y = set.labels[i] == positive ? 1.0 : -1.0;
            const auto& f = set.features[i];
            double s = mean[dim];
            for (std::size_t d = 0; d < dim; ++d) s += mean[d] * f[d];
            hinge += std::max(0.0, 1.0 - y * s);
        }
        trace.push_back(0.5 * p.lambda * sq + hinge / double(n));
    }

    w_out.assign(mean.begin(), mean.end() - 1);
    b_out = mean[dim];
}

} // namespace detail

/// One-vs-rest linear SVM. Each class gets an independent binary trainer
/// seeded from params.seed and the class id.
inline SvmModel train_svm(const LabeledFeatureSet& train, const SvmParams& params = {}) {
    params.validate();
    train.validate(false);
    const auto counts = train.class_counts();
    const auto present = std::count_if(counts.begin(), counts.end(), [](int c) { return c > 0; });
    if (present < 2) throw InsufficientData("svm training needs samples from at least 2 classes");

    SvmModel model;
    model.params = params;
    model.weights.resize(std::size_t(train.classes));
    model.biases.resize(std::size_t(train.classes));
    model.objective_trace.resize(std::size_t(train.classes));
    for (int k = 0; k < train.classes; ++k) {
        detail::train_binary(train, k, params, model.weights[std::size_t(k)],
                             model.biases[std::size_t(k)], model.objective_trace[std::size_t(k)]);
    }
    return model;
}

struct Evaluation {
    double accuracy = 0.0;
    std::size_t correct = 0, total = 0;
    std::vector<std::vector<int>> confusion; // [true][predicted]
};

inline Evaluation evaluate(const SvmModel& model, const LabeledFeatureSet& test) {
    if (test.size() == 0) throw InsufficientData("cannot evaluate on an empty test set");
    test.validate(false);
    if (test.classes > model.classes()) {
        throw ShapeMismatch("test set has more classes than the model");
    }
    if (test.dimension() != model.dimension()) {
        throw ShapeMismatch("test dimension " + std::to_string(test.dimension()) +
                            " != model dimension " + std::to_string(model.dimension()));
    }
    Evaluation ev;
    const auto K = std::size_t(model.classes());
    ev.confusion.assign(K, std::vector<int>(K, 0));
    for (std::size_t i = 0; i < test.size(); ++i) {
        const int pred = model.predict(test.features[i]);
        ++ev.confusion[std::size_t(test.labels[i])][std::size_t(pred)];
        ev.correct += pred == test.labels[i];
    }
    ev.total = test.size();
    ev.accuracy = double(ev.correct) / double(ev.total);
    return ev;
}

} // namespace gradpres
