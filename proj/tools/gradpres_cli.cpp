// gradpres: command-line front end for protection, HOG extraction and
// recognition-parity evaluation.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <gradpres/gradpres.hpp>

namespace fs = std::filesystem;
using namespace gradpres;

namespace {

const std::map<std::string, BorderPolicy> kBorders{{"replicate", BorderPolicy::ReplicateEdge},
                                                   {"skip", BorderPolicy::SkipBorder}};
const std::map<std::string, AngleMetric> kMetrics{{"raw", AngleMetric::Raw},
                                                  {"wrapped", AngleMetric::Wrapped}};
const std::map<std::string, LineSearch> kLineSearch{{"backtracking", LineSearch::Backtracking},
                                                    {"fixed", LineSearch::Fixed}};

void add_gdm_options(CLI::App* cmd, GdmConfig& cfg) {
    cmd->add_option("--eps", cfg.epsilon, "division guard epsilon")->check(CLI::PositiveNumber);
    cmd->add_option("--border", cfg.border, "border policy: replicate|skip")
        ->transform(CLI::CheckedTransformer(kBorders, CLI::ignore_case));
}

void add_optimizer_options(CLI::App* cmd, OptimizerConfig& opt, const std::string& seed_flag) {
    cmd->add_option(seed_flag, opt.seed, "PRNG seed for the latent initialization");
    cmd->add_option("--lr", opt.learning_rate, "initial step size")->check(CLI::PositiveNumber);
    cmd->add_option("--iters", opt.max_iters, "maximum descent iterations")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--tol", opt.tolerance, "stop when the residual norm is at most this")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--init-scale", opt.init_scale, "latent init range [-s, s]")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--metric", opt.angle_metric, "optimizer angle difference: wrapped|raw")
        ->transform(CLI::CheckedTransformer(kMetrics, CLI::ignore_case));
    cmd->add_option("--line-search", opt.line_search, "backtracking|fixed")
        ->transform(CLI::CheckedTransformer(kLineSearch, CLI::ignore_case));
}

void write_json(const fs::path& path, const json& doc) {
    write_atomically(path, [&](const fs::path& tmp) {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw IoError(tmp.string(), "cannot open for writing");
        out << doc.dump(2) << '\n';
        if (!out) throw IoError(tmp.string(), "write failed");
    });
}

void write_feature_table(const fs::path& path, const LabeledFeatureSet& set) {
    write_atomically(path, [&](const fs::path& tmp) {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw IoError(tmp.string(), "cannot open for writing");
        for (std::size_t i = 0; i < set.size(); ++i) {
            out << set.labels[i];
            for (double v : set.features[i]) out << ',' << format_double(v);
            out << '\n';
        }
        if (!out) throw IoError(tmp.string(), "write failed");
    });
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gradient-preserving image protection and HOG evaluation"};
    app.require_subcommand(1);

    // protect
    std::string protect_in, protect_out, protect_report;
    OptimizerConfig protect_opt;
    GdmConfig protect_gdm;
    auto* protect = app.add_subcommand("protect", "generate a gradient-preserving image");
    protect->add_option("input", protect_in, "source image (.pgm/.png)")->required()->check(CLI::ExistingFile);
    protect->add_option("output", protect_out, "protected image (.pgm/.png)")->required();
    protect->add_option("--report", protect_report, "write the convergence report as JSON");
    add_optimizer_options(protect, protect_opt, "--seed");
    add_gdm_options(protect, protect_gdm);

    // gdm
    std::string gdm_in, gdm_out;
    GdmConfig gdm_cfg;
    auto* gdm_cmd = app.add_subcommand("gdm", "render the gradient direction map as PNG");
    gdm_cmd->add_option("input", gdm_in)->required()->check(CLI::ExistingFile);
    gdm_cmd->add_option("output", gdm_out)->required();
    add_gdm_options(gdm_cmd, gdm_cfg);

    // hog
    std::string hog_in, hog_out;
    HogConfig hog_cfg;
    GdmConfig hog_gdm;
    bool hog_weighted = false;
    auto* hog = app.add_subcommand("hog", "extract a HOG descriptor (.csv or .bin)");
    hog->add_option("input", hog_in)->required()->check(CLI::ExistingFile);
    hog->add_option("output", hog_out)->required();
    hog->add_option("--cell", hog_cfg.cell_size, "cell size in pixels")->check(CLI::PositiveNumber);
    hog->add_option("--bins", hog_cfg.bins, "orientation bins")->check(CLI::Range(2, 360));
    hog->add_flag("--weighted", hog_weighted, "weight votes by gradient magnitude");
    add_gdm_options(hog, hog_gdm);

    // synth
    std::string synth_out;
    SynthConfig synth_cfg;
    auto* synth = app.add_subcommand("synth", "write a synthetic grating dataset");
    synth->add_option("outdir", synth_out)->required();
    synth->add_option("--classes", synth_cfg.classes)->check(CLI::Range(1, 16));
    synth->add_option("--per-class", synth_cfg.per_class)->check(CLI::PositiveNumber);
    synth->add_option("--size", synth_cfg.size)->check(CLI::Range(32, 4096));
    synth->add_option("--noise", synth_cfg.noise_std)->check(CLI::NonNegativeNumber);
    synth->add_option("--seed", synth_cfg.seed);

    // eval
    std::string eval_root, eval_report, eval_export;
    std::vector<std::string> eval_pipelines{"proposed", "plain", "weighted"};
    std::vector<std::string> eval_exclude;
    std::uint64_t eval_seed = 0;
    int eval_repeats = 1;
    ParityConfig parity;
    auto* eval = app.add_subcommand("eval", "recognition accuracy on a class-per-directory dataset");
    eval->add_option("dataset", eval_root, "root/<identity>/<image>")->required()->check(CLI::ExistingDirectory);
    eval->add_option("--pipeline", eval_pipelines, "proposed|plain|weighted|pixels (repeatable)")
        ->check(CLI::IsMember({"proposed", "plain", "weighted", "pixels"}));
    eval->add_option("--seed", eval_seed, "split/SVM seed of the first run");
    eval->add_option("--repeats", eval_repeats, "runs with seeds seed, seed+1, ...")->check(CLI::PositiveNumber);
    eval->add_option("--report", eval_report, "write the report as JSON");
    eval->add_option("--export-dir", eval_export, "write label,features CSV per pipeline");
    eval->add_option("--exclude", eval_exclude, "skip files whose name contains this (repeatable)");
    eval->add_option("--lambda", parity.svm.lambda)->check(CLI::PositiveNumber);
    eval->add_option("--epochs", parity.svm.epochs)->check(CLI::PositiveNumber);
    eval->add_option("--cell", parity.hog.cell_size)->check(CLI::PositiveNumber);
    eval->add_option("--bins", parity.hog.bins)->check(CLI::Range(2, 360));
    eval->add_option("--jobs", parity.jobs, "worker threads")->check(CLI::PositiveNumber);
    eval->add_flag("--quantize", parity.quantize, "round protected images to 8 bits before HOG");
    add_optimizer_options(eval, parity.protect, "--protect-seed");
    add_gdm_options(eval, parity.gdm);

    // verify
    std::string verify_x, verify_xp, verify_panel;
    GdmConfig verify_gdm;
    auto* verify = app.add_subcommand("verify", "compare the direction maps of two images");
    verify->add_option("original", verify_x)->required()->check(CLI::ExistingFile);
    verify->add_option("protected", verify_xp)->required()->check(CLI::ExistingFile);
    verify->add_option("--panel", verify_panel, "write original | protected | GDM(protected) PNG");
    add_gdm_options(verify, verify_gdm);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*protect) {
            const GrayImage x = load_image(protect_in);
            const auto result = generate_protected(x, protect_opt, protect_gdm);
            save_image(result.image, protect_out);
            if (!protect_report.empty()) write_json(protect_report, to_json(result.report));
            std::fprintf(stderr, "protect: %d iterations, objective %.6g -> %.6g, mean |dtheta| %.4g rad%s\n",
                         result.report.iterations, result.report.initial_objective,
                         result.report.final_objective, result.report.final_residual.mean_abs,
                         result.report.stalled ? " (stalled)" : "");
        } else if (*gdm_cmd) {
            save_gdm(gdm(load_image(gdm_in), gdm_cfg), gdm_out);
        } else if (*hog) {
            hog_cfg.weighting = hog_weighted ? HogWeighting::MagnitudeWeighted : HogWeighting::Unweighted;
            const auto features = extract_hog(load_image(hog_in), hog_cfg, hog_gdm);
            write_features(hog_out, features);
            std::fprintf(stderr, "hog: %zu values\n", features.size());
        } else if (*synth) {
            write_dataset(synth_dataset(synth_cfg), synth_out);
        } else if (*eval) {
            DatasetOptions opts;
            opts.exclude = eval_exclude;
            const auto data = load_dataset(eval_root, opts);
            parity.pipelines.clear();
            for (const auto& name : eval_pipelines) parity.pipelines.push_back(parse_pipeline(name));
            parity.seeds.clear();
            for (int r = 0; r < eval_repeats; ++r) parity.seeds.push_back(eval_seed + std::uint64_t(r));
            std::fprintf(stderr, "eval: %zu images, %zu classes, %zu skipped\n", data.images.size(),
                         data.manifest.class_names.size(), data.manifest.skipped.size());
            const int classes = int(data.manifest.class_names.size());
            const auto report = parity_report(data.images, classes, parity);
            std::cout << format_table(report);
            if (!eval_report.empty()) {
                json doc = to_json(report);
                doc["dataset"] = {{"root", eval_root},
                                  {"images", data.images.size()},
                                  {"classes", data.manifest.class_names},
                                  {"skipped", json::array()}};
                for (const auto& s : data.manifest.skipped) {
                    doc["dataset"]["skipped"].push_back(
                        {{"path", s.relative_path.generic_string()}, {"reason", s.reason}});
                }
                write_json(eval_report, doc);
            }
            if (!eval_export.empty()) {
                fs::create_directories(eval_export);
                for (const auto& [p, set] : report.features) {
                    write_feature_table(fs::path(eval_export) / (std::string(pipeline_name(p)) + ".csv"), set);
                }
            }
        } else if (*verify) {
            const GrayImage x = load_image(verify_x), xp = load_image(verify_xp);
            const auto r = gdm_residual(gdm(x, verify_gdm), gdm(xp, verify_gdm));
            std::printf("residual_norm %s\nmean_abs_angle %s\nmax_abs_angle %s\n",
                        format_double(r.norm).c_str(), format_double(r.mean_abs).c_str(),
                        format_double(r.max_abs).c_str());
            std::printf("ssim %s\n", format_double(ssim(x, xp)).c_str());
            if (!verify_panel.empty()) save_protection_panel(x, xp, verify_gdm, verify_panel);
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
