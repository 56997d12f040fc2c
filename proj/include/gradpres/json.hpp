#pragma once

// JSON views of configs and reports (nlohmann::json).

#include <nlohmann/json.hpp>

#include "generator.hpp"
#include "parity.hpp"

namespace gradpres {

using nlohmann::json;

inline const char* to_string(BorderPolicy p) {
    return p == BorderPolicy::ReplicateEdge ? "replicate_edge" : "skip_border";
}
inline const char* to_string(LineSearch l) {
    return l == LineSearch::Backtracking ? "backtracking" : "fixed";
}
inline const char* to_string(AngleMetric m) { return m == AngleMetric::Raw ? "raw" : "wrapped"; }

inline json to_json(const GdmConfig& c) {
    return {{"epsilon", c.epsilon}, {"border_policy", to_string(c.border)}};
}

inline json to_json(const OptimizerConfig& c) {
    return {{"seed", c.seed},
            {"init_scale", c.init_scale},
            {"learning_rate", c.learning_rate},
            {"max_iters", c.max_iters},
            {"tolerance", c.tolerance},
            {"use_squared_objective", c.use_squared_objective},
            {"line_search", to_string(c.line_search)},
            {"angle_metric", to_string(c.angle_metric)},
            {"min_step", c.min_step}};
}

inline json to_json(const Residual& r) {
    return {{"norm", r.norm}, {"mean_abs", r.mean_abs}, {"max_abs", r.max_abs}};
}

inline json to_json(const ConvergenceReport& r) {
    return {{"iterations", r.iterations},
            {"initial_objective", r.initial_objective},
            {"final_objective", r.final_objective},
            {"objective_trace", r.objective_trace},
            {"final_residual", to_json(r.final_residual)},
            {"converged", r.converged},
            {"stalled", r.stalled},
            {"seed", r.seed},
            {"config", {{"optimizer", to_json(r.optimizer)}, {"gdm", to_json(r.gdm)}}}};
}

inline json to_json(const HogConfig& c) {
    return {{"cell_size", c.cell_size}, {"bins", c.bins}};
}

inline json to_json(const SvmParams& p) {
    return {{"lambda", p.lambda}, {"epochs", p.epochs}};
}

inline json to_json(const ParityRow& r) {
    return {{"pipeline", pipeline_name(r.pipeline)},
            {"seed", r.seed},
            {"accuracy", r.evaluation.accuracy},
            {"n_train", r.n_train},
            {"n_test", r.n_test},
            {"confusion", r.evaluation.confusion}};
}

inline json to_json(const ParityReport& rep) {
    json rows = json::array();
    for (const auto& r : rep.rows) rows.push_back(to_json(r));
    json summary = json::array();
    for (const auto& s : rep.summary) {
        summary.push_back({{"pipeline", pipeline_name(s.pipeline)},
                           {"mean_accuracy", s.mean},
                           {"std_accuracy", s.stddev},
                           {"runs", s.runs}});
    }
    json protection = json::object();
    for (const auto& [p, st] : rep.protection) {
        protection[std::string(pipeline_name(p))] = {
            {"images", st.images},
            {"mean_abs_residual", st.mean_abs_residual},
            {"max_mean_abs_residual", st.max_mean_abs_residual},
            {"mean_iterations", st.mean_iterations}};
    }
    json pipelines = json::array();
    for (auto p : rep.config.pipelines) pipelines.push_back(pipeline_name(p));
    return {{"rows", rows},
            {"summary", summary},
            {"protection", protection},
            {"config",
             {{"pipelines", pipelines},
              {"seeds", rep.config.seeds},
              {"svm", to_json(rep.config.svm)},
              {"hog", to_json(rep.config.hog)},
              {"gdm", to_json(rep.config.gdm)},
              {"protect", to_json(rep.config.protect)},
              {"quantize", rep.config.quantize}}}};
}

} // namespace gradpres
