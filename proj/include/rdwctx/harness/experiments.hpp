#pragma once
/**
 * @file experiments.hpp
 * @brief Multi-step workflows shared by the CLI, the pipeline and the acceptance runs.
 */

#include "rdwctx/harness/metrics.hpp"
#include "rdwctx/lateral/evaluation.hpp"
#include "rdwctx/rotation/fft_baseline.hpp"
#include "rdwctx/rotation/preprocess.hpp"
#include "rdwctx/rotation/timegan.hpp"
#include "rdwctx/sim/session.hpp"

#include <json.hpp>

#include <limits>
#include <string>
#include <vector>

namespace rdwctx::harness {

/// Channel @p c of every row of every window.
inline std::vector<double> channel_samples(const std::vector<nn::Matrix>& windows, int c = 0)
{
    std::vector<double> out;
    for (const auto& w : windows)
        for (Eigen::Index r = 0; r < w.rows(); ++r)
            out.push_back(w(r, c));
    return out;
}

/// Yaw KL(target || other) over 10-degree buckets, with the +-180 bucket merged.
inline double yaw_kl(const std::vector<nn::Matrix>& target, const std::vector<nn::Matrix>& other, double width = 10.0,
                     double eps = 1e-9)
{
    return sample_kl(channel_samples(target, 0), channel_samples(other, 0), width, true, eps);
}

/// Evenly strided subset of at most @p cap elements (all if cap is 0).
template <class T>
std::vector<T> stride_subsample(const std::vector<T>& v, std::size_t cap)
{
    if (cap == 0 || v.size() <= cap)
        return v;
    std::vector<T> out;
    out.reserve(cap);
    const double step = static_cast<double>(v.size()) / static_cast<double>(cap);
    for (std::size_t k = 0; k < cap; ++k)
        out.push_back(v[static_cast<std::size_t>(static_cast<double>(k) * step)]);
    return out;
}

// Lateral.

struct LateralScenario {
    int users{1};
    sim::PathKind path{sim::PathKind::straight};

    [[nodiscard]] std::string label() const { return sim::to_string(path) + "_" + std::to_string(users) + "u"; }
};

struct LateralOutcome {
    lateral::SeReport baseline, virtual_context;
    lateral::TrainingLog baseline_log, virtual_log;
    lateral::PredictorModel baseline_model, virtual_model;
    sim::SessionTrace train_trace, test_trace;

    [[nodiscard]] double improvement() const
    {
        return 1.0 - virtual_context.aggregate.mean / baseline.aggregate.mean;
    }
};

/**
 * Simulates a training and a held-out session (sub-seeds 1 and 2 of
 * @p seed), trains both variants (sub-seed 3) and evaluates on the held-out
 * trace.
 */
inline LateralOutcome run_lateral_scenario(sim::SessionConfig base, const LateralScenario& sc,
                                           const lateral::PredictorHyper& hp, Seed seed)
{
    base.env.num_users = sc.users;
    base.path = sc.path;
    LateralOutcome out;
    base.seed = derive_seed(seed, 1);
    out.train_trace = sim::run_session(base);
    base.seed = derive_seed(seed, 2);
    out.test_trace = sim::run_session(base);
    const lateral::ScenarioInfo info{sc.users, sim::to_string(sc.path), sc.label()};
    for (auto v : {lateral::Variant::baseline, lateral::Variant::virtual_context}) {
        const auto train = lateral::build_windows(out.train_trace, v, hp.lookback, hp.horizon);
        const auto test = lateral::build_windows(out.test_trace, v, hp.lookback, hp.horizon);
        lateral::TrainingLog log;
        auto model = lateral::train_predictor(train, hp, derive_seed(seed, 3), &log, out.train_trace.rate);
        auto rep = lateral::eval_se(model, test, info);
        if (v == lateral::Variant::baseline) {
            out.baseline = std::move(rep);
            out.baseline_log = std::move(log);
            out.baseline_model = std::move(model);
        } else {
            out.virtual_context = std::move(rep);
            out.virtual_log = std::move(log);
            out.virtual_model = std::move(model);
        }
    }
    return out;
}

// Rotation generation.

struct SelectionConfig {
    std::string mode{"val_kl"}; ///< "val_kl" or "fixed"
    int fixed_epoch{0};         ///< 0 = last checkpoint
    double val_fraction{0.2}; ///< tail of every session held out for checkpoint scoring
    std::size_t min_windows{1000}; ///< training refuses smaller corpora
};

struct TimeGanExperiment {
    rotation::QuantileTransformer transformer;
    rotation::TimeGanResult result;
    std::size_t source_windows{0}; ///< windows in the whole corpus
    std::size_t train_windows{0};
    std::size_t val_windows{0};
    std::vector<nn::Matrix> target_windows; ///< whole corpus, degrees
    std::vector<double> checkpoint_val_kl;  ///< one per checkpoint
    std::size_t selected{0};                ///< index into result.checkpoints
    std::vector<std::string> warnings;

    [[nodiscard]] const rotation::TimeGanModel& selected_model() const
    {
        return result.checkpoints.empty() ? result.model : result.checkpoints[selected].model;
    }
};

/// Windows in degrees (yaw wrapped) generated by @p model and mapped back through @p t.
inline std::vector<nn::Matrix> generate_degrees(const rotation::TimeGanModel& model,
                                                const rotation::QuantileTransformer& t, std::size_t n, Seed seed)
{
    return rotation::postprocess(rotation::timegan_generate(model, n, seed), t);
}

/**
 * Splits every session in time: the last val_fraction is validation, the
 * rest trains. Fits the transformer on the training parts, trains TimeGAN on
 * at most @p max_train_windows of their windows, then scores every
 * checkpoint by yaw KL against the validation windows. Without a split the
 * training windows double as validation (warned).
 */
inline TimeGanExperiment run_timegan_experiment(const std::vector<rotation::RotationSeries>& corpus,
                                                const rotation::PreprocessConfig& pcfg,
                                                const rotation::TimeGanHyper& hyper, std::size_t max_train_windows,
                                                const SelectionConfig& sel, Seed seed, double bucket = 10.0,
                                                double eps = 1e-9, const rotation::TimeGanProgress& progress = {})
{
    if (sel.mode != "val_kl" && sel.mode != "fixed")
        throw ConfigError("selection: mode must be 'val_kl' or 'fixed'");
    if (!(sel.val_fraction >= 0.0 && sel.val_fraction < 1.0))
        throw ConfigError("selection: val_fraction must be in [0, 1)");
    TimeGanExperiment ex;
    const bool split = sel.mode == "val_kl" && sel.val_fraction > 0.0;
    std::vector<rotation::RotationSeries> train_s, val_s;
    for (const auto& s : corpus) {
        if (!split) {
            train_s.push_back(s);
            continue;
        }
        const auto cut = static_cast<std::size_t>(std::floor((1.0 - sel.val_fraction) * static_cast<double>(s.length())));
        train_s.push_back(rotation::slice(s, 0, cut));
        val_s.push_back(rotation::slice(s, cut, s.length()));
    }
    if (sel.mode == "val_kl" && !split)
        ex.warnings.push_back("selection: no validation split; scoring on training windows");

    const auto train = rotation::preprocess(train_s, pcfg);
    ex.transformer = train.transformer;
    const auto all = rotation::preprocess(corpus, pcfg, &ex.transformer);
    ex.source_windows = all.windows.size();
    ex.target_windows = all.raw_windows;
    const auto train_w = stride_subsample(train.windows, max_train_windows);
    ex.train_windows = train_w.size();

    std::vector<nn::Matrix> val_raw = train.raw_windows;
    if (split)
        val_raw = rotation::preprocess(val_s, pcfg, &ex.transformer).raw_windows;
    ex.val_windows = val_raw.size();

    ex.result = rotation::timegan_train(train_w, hyper, derive_seed(seed, 1), sel.min_windows, progress);
    for (const auto& w : ex.result.log.warnings)
        ex.warnings.push_back(w);

    auto& cps = ex.result.checkpoints;
    if (cps.empty()) {
        ex.warnings.push_back("selection: no checkpoint was taken; using the final model");
        return ex;
    }
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < cps.size(); ++k) {
        const auto gen = generate_degrees(cps[k].model, ex.transformer, val_raw.size(), derive_seed(seed, 2));
        const double kl = yaw_kl(val_raw, gen, bucket, eps);
        ex.checkpoint_val_kl.push_back(kl);
        if (sel.mode == "val_kl" && kl < best) {
            best = kl;
            ex.selected = k;
        }
    }
    if (sel.mode == "fixed") {
        ex.selected = cps.size() - 1;
        if (sel.fixed_epoch > 0) {
            bool found = false;
            for (std::size_t k = 0; k < cps.size(); ++k)
                if (cps[k].epoch == sel.fixed_epoch) {
                    ex.selected = k;
                    found = true;
                }
            if (!found)
                throw ConfigError("selection: no checkpoint at epoch " + std::to_string(sel.fixed_epoch));
        }
    }
    return ex;
}

/**
 * FFT baseline windows: @p n_series series of @p length samples at the
 * corpus rate, each downsampled and windowed like the real data.
 */
inline std::vector<nn::Matrix> fft_windows(const rotation::PsdModel& model, int n_series, std::size_t length,
                                           const rotation::PreprocessConfig& pcfg, Seed seed)
{
    std::vector<nn::Matrix> out;
    for (int k = 0; k < n_series; ++k) {
        const auto s = rotation::fft_baseline_generate(model, length, derive_seed(seed, static_cast<std::uint64_t>(k)));
        auto m = rotation::downsampled_matrix(s, pcfg);
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            m(i, 0) = wrap_angle(m(i, 0));
        if (m.rows() < pcfg.window)
            throw ConfigError("fft: generated series too short for one window");
        for (auto& w : rotation::slide_windows(m, pcfg.window, pcfg.stride))
            out.push_back(std::move(w));
    }
    return out;
}

/// Per-channel KL of TimeGAN and FFT windows against the target corpus; yaw merges the wrap bucket.
inline nlohmann::json channel_kl_json(const std::vector<nn::Matrix>& target, const std::vector<nn::Matrix>& other,
                                      double width, double eps)
{
    static const char* names[] = {"yaw", "pitch", "roll"};
    nlohmann::json j;
    for (int c = 0; c < rotation::kChannels; ++c)
        j[names[c]] = sample_kl(channel_samples(target, c), channel_samples(other, c), width, c == 0, eps);
    return j;
}

} // namespace rdwctx::harness
