#include <gradpres/json.hpp>
#include <gradpres/parity.hpp>
#include <gradpres/synth.hpp>
#include <gtest/gtest.h>

using namespace gradpres;

TEST(Synth, BalancedLabels) {
    const auto data = synth_dataset({.classes = 5, .per_class = 7, .size = 32});
    ASSERT_EQ(data.size(), 35u);
    std::vector<int> counts(5, 0);
    for (const auto& li : data) ++counts[std::size_t(li.label)];
    EXPECT_EQ(counts, std::vector<int>(5, 7));
}

TEST(Synth, DeterministicPerSeed) {
    const SynthConfig c{.classes = 3, .per_class = 2, .size = 32, .seed = 4};
    const auto a = synth_dataset(c), b = synth_dataset(c);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].image, b[i].image);
    SynthConfig d = c;
    d.seed = 5;
    EXPECT_NE(synth_dataset(d)[0].image, a[0].image);
}

TEST(Synth, PixelsInRangeAndSized) {
    for (const auto& li : synth_dataset({.classes = 4, .per_class = 3, .size = 48, .noise_std = 0.3})) {
        EXPECT_EQ(li.image.height(), 48u);
        EXPECT_EQ(li.image.width(), 48u);
        for (double v : li.image.pixels()) {
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, 1.0);
        }
    }
}

TEST(Synth, NoiselessSamePhaseGivesIdenticalFeatures) {
    std::mt19937_64 rng(0);
    for (int k = 0; k < 4; ++k) {
        const double o = k * std::numbers::pi / 4;
        const auto a = grating(32, o, 1.3, 8.0, 0.35, 0.0, rng);
        const auto b = grating(32, o, 1.3, 8.0, 0.35, 0.0, rng);
        EXPECT_EQ(extract_hog(a), extract_hog(b));
    }
}

TEST(Synth, ParameterChecks) {
    EXPECT_THROW(synth_dataset({.classes = 17}), InvalidArgument);
    EXPECT_THROW(synth_dataset({.classes = 0}), InvalidArgument);
    EXPECT_THROW(synth_dataset({.size = 31}), InvalidArgument);
}

TEST(Pipelines, NamesRoundTrip) {
    for (auto p : {Pipeline::Proposed, Pipeline::Plain, Pipeline::Weighted, Pipeline::Pixels})
        EXPECT_EQ(parse_pipeline(pipeline_name(p)), p);
    EXPECT_THROW(parse_pipeline("eigenface"), InvalidArgument);
}

TEST(Quantize, RoundsToByteLevels) {
    RealGrid g(3, 3, 0.5);
    g(0, 0) = 0.0;
    g(2, 2) = 1.0;
    const auto q = quantize_8bit(GrayImage(g));
    EXPECT_DOUBLE_EQ(q(1, 1), 128.0 / 255.0);
    EXPECT_EQ(q(0, 0), 0.0);
    EXPECT_EQ(q(2, 2), 1.0);
}

namespace {

ParityConfig small_config() {
    ParityConfig cfg;
    cfg.protect.max_iters = 40;
    cfg.svm.epochs = 10;
    cfg.seeds = {0, 1};
    return cfg;
}

} // namespace

TEST(ParityReport, DuplicatePipelineGivesIdenticalRows) {
    const auto data = synth_dataset({.classes = 3, .per_class = 4, .size = 32});
    auto cfg = small_config();
    cfg.pipelines = {Pipeline::Plain, Pipeline::Plain};
    const auto rep = parity_report(data, 3, cfg);
    ASSERT_EQ(rep.rows.size(), 4u);
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_EQ(rep.rows[i].evaluation.confusion, rep.rows[i + 2].evaluation.confusion);
        EXPECT_EQ(rep.rows[i].evaluation.accuracy, rep.rows[i + 2].evaluation.accuracy);
    }
}

TEST(ParityReport, DeterministicAndThreadIndependent) {
    const auto data = synth_dataset({.classes = 3, .per_class = 4, .size = 32});
    auto cfg = small_config();
    const auto a = to_json(parity_report(data, 3, cfg));
    cfg.jobs = 3;
    const auto b = to_json(parity_report(data, 3, cfg));
    EXPECT_EQ(a["rows"], b["rows"]);
    EXPECT_EQ(a["protection"], b["protection"]);
}

TEST(ParityReport, ShapeAndJsonSchema) {
    const auto data = synth_dataset({.classes = 4, .per_class = 4, .size = 32});
    auto cfg = small_config();
    cfg.pipelines = {Pipeline::Proposed, Pipeline::Plain, Pipeline::Weighted, Pipeline::Pixels};
    const auto rep = parity_report(data, 4, cfg);
    ASSERT_EQ(rep.rows.size(), 8u);
    ASSERT_EQ(rep.summary.size(), 4u);
    EXPECT_EQ(rep.rows[0].pipeline, Pipeline::Proposed);
    EXPECT_EQ(rep.rows[1].seed, 1u);
    EXPECT_EQ(rep.rows[0].n_train, 8u);
    EXPECT_EQ(rep.rows[0].n_test, 8u);
    EXPECT_EQ(rep.protection.count(Pipeline::Proposed), 1u);
    EXPECT_EQ(rep.protection.at(Pipeline::Proposed).images, 16u);

    const auto j = to_json(rep);
    for (const char* key : {"pipeline", "seed", "accuracy", "n_train", "n_test", "confusion"})
        EXPECT_TRUE(j["rows"][0].contains(key)) << key;
    EXPECT_EQ(j["rows"][0]["pipeline"], "proposed");
    EXPECT_EQ(j["rows"][0]["confusion"].size(), 4u);
    EXPECT_TRUE(j["summary"][0].contains("mean_accuracy"));
    EXPECT_TRUE(j["summary"][0].contains("std_accuracy"));
    EXPECT_TRUE(j["config"]["protect"].contains("seed"));

    const auto table = format_table(rep);
    EXPECT_NE(table.find("proposed"), std::string::npos);
    EXPECT_NE(table.find("pixels"), std::string::npos);
}

TEST(ParityReport, SummaryStatistics) {
    const auto data = synth_dataset({.classes = 3, .per_class = 6, .size = 32});
    auto cfg = small_config();
    cfg.pipelines = {Pipeline::Plain};
    cfg.seeds = {0, 1, 2};
    const auto rep = parity_report(data, 3, cfg);
    double mean = 0.0;
    for (const auto& r : rep.rows) mean += r.evaluation.accuracy / 3.0;
    EXPECT_NEAR(rep.summary[0].mean, mean, 1e-15);
    EXPECT_EQ(rep.summary[0].runs, 3u);
}

TEST(ParityReport, Errors) {
    const auto data = synth_dataset({.classes = 2, .per_class = 2, .size = 32});
    auto cfg = small_config();
    cfg.pipelines.clear();
    EXPECT_THROW(parity_report(data, 2, cfg), InvalidArgument);
    cfg = small_config();
    cfg.seeds.clear();
    EXPECT_THROW(parity_report(data, 2, cfg), InvalidArgument);
}

TEST(ConvergenceJson, CarriesSeedAndTrace) {
    OptimizerConfig opt;
    opt.seed = 23;
    opt.max_iters = 5;
    const auto r = generate_protected(synth_dataset({.classes = 1, .per_class = 1, .size = 32})[0].image, opt);
    const auto j = to_json(r.report);
    EXPECT_EQ(j["seed"], 23u);
    EXPECT_EQ(j["objective_trace"].size(), r.report.objective_trace.size());
    EXPECT_EQ(j["config"]["optimizer"]["seed"], 23u);
}
