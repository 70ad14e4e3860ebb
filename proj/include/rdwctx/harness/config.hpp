#pragma once
/**
 * @file config.hpp
 * @brief Structured run configuration: one JSON tree holding every default.
 *
 * A user file is merge-patched onto the defaults. Keys absent from the
 * defaults tree are rejected at any depth so typos never pass silently.
 */

#include "rdwctx/core/errors.hpp"
#include "rdwctx/harness/experiments.hpp"
#include "rdwctx/lateral/predictor.hpp"
#include "rdwctx/rotation/corpus.hpp"
#include "rdwctx/rotation/fft_baseline.hpp"
#include "rdwctx/rotation/preprocess.hpp"
#include "rdwctx/rotation/timegan.hpp"
#include "rdwctx/sim/session.hpp"

#include <json.hpp>

#include <fstream>
#include <string>

namespace rdwctx::sim {
NLOHMANN_JSON_SERIALIZE_ENUM(PathKind, {{PathKind::straight, "straight"}, {PathKind::random_curved, "random"}})
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(Environment, side, num_users)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(NoticeabilityThresholds, min_curvature_radius, rotation_gain_low,
                                                rotation_gain_high, translation_gain_low, translation_gain_high)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ApfParams, wall_weight, user_weight, epsilon)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(SteeringParams, curvature_response, force_reference)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ResetParams, trigger_distance, physical_turn_rate, physical_turn,
                                                virtual_ratio)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(WalkerParams, preferred_speed, speed_sigma, speed_correlation,
                                                start_radius)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(PathParams, max_curvature_deg_per_m, curvature_sigma_deg_per_m,
                                                correlation_length_m, resolution_m, nominal_speed)
} // namespace rdwctx::sim

namespace rdwctx::nn {
NLOHMANN_JSON_SERIALIZE_ENUM(CellKind, {{CellKind::lstm, "lstm"}, {CellKind::gru, "gru"}})
}

namespace rdwctx::lateral {
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(PredictorHyper, lookback, horizon, cell, hidden, batch, lr, max_epochs,
                                                patience, val_fraction, max_train_windows, min_windows,
                                                keep_reset_windows)
}

namespace rdwctx::rotation {
NLOHMANN_JSON_SERIALIZE_ENUM(DownsampleFilter, {{DownsampleFilter::windowed_sinc, "windowed_sinc"},
                                                {DownsampleFilter::moving_average, "moving_average"}})
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(CorpusParams, sessions, duration, rate, yaw_modes, yaw_kappa,
                                                mean_dwell, min_dwell, swing_time, jitter_sigma, jitter_tau,
                                                pitch_mean, pitch_sigma, pitch_tau, roll_sigma, roll_tau)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(DownsampleOptions, filter, cutoff_fraction, taps_per_factor)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(PreprocessConfig, window_rate, window, stride, n_quantiles, downsample)
} // namespace rdwctx::rotation

namespace rdwctx::harness {

using nlohmann::json;

/// Session knobs except the seed, which always comes from the command line.
inline json session_to_json(const sim::SessionConfig& c)
{
    return {{"env", c.env},           {"path", c.path},         {"duration", c.duration},
            {"rate", c.rate},         {"sim_rate", c.sim_rate}, {"thresholds", c.thresholds},
            {"apf", c.apf},           {"steering", c.steering}, {"reset", c.reset},
            {"walker", c.walker},     {"path_params", c.path_params}};
}

inline sim::SessionConfig session_from_json(const json& j, Seed seed)
{
    sim::SessionConfig c;
    c.env = j.at("env").get<sim::Environment>();
    c.path = j.at("path").get<sim::PathKind>();
    c.duration = j.at("duration").get<double>();
    c.rate = j.at("rate").get<double>();
    c.sim_rate = j.at("sim_rate").get<double>();
    c.thresholds = j.at("thresholds").get<sim::NoticeabilityThresholds>();
    c.apf = j.at("apf").get<sim::ApfParams>();
    c.steering = j.at("steering").get<sim::SteeringParams>();
    c.reset = j.at("reset").get<sim::ResetParams>();
    c.walker = j.at("walker").get<sim::WalkerParams>();
    c.path_params = j.at("path_params").get<sim::PathParams>();
    c.seed = seed;
    c.validate();
    return c;
}

/// Lateral predictor settings as probed for the desk-scale acceptance runs.
inline lateral::PredictorHyper desk_predictor_hyper()
{
    lateral::PredictorHyper h;
    h.hidden = {32};
    h.max_epochs = 30;
    h.max_train_windows = 4000;
    h.lr = 3e-3;
    return h;
}

/// TimeGAN settings used at desk scale (single core, minutes not hours).
inline rotation::TimeGanHyper desk_timegan_hyper()
{
    rotation::TimeGanHyper h;
    h.hidden = 12;
    h.latent = 12;
    h.layers = 2;
    h.embedding_epochs = 10;
    h.supervised_epochs = 10;
    h.joint_epochs = 100;
    return h;
}

/**
 * Every default. Sections:
 *   sim       session parameters (users and path are overridden per scenario by pipeline)
 *   lateral   predictor hyper-parameters and the variant train-lateral uses
 *   rotation  corpus generator, preprocessing, TimeGAN, FFT baseline, generation, checkpoint selection
 *   metrics   histogram width and KL smoothing
 *   beam      access point and beamwidth for beam-eval
 *   pipeline  scenario matrix
 */
inline json default_config()
{
    const sim::SessionConfig session;
    return {
        {"sim", session_to_json(session)},
        {"lateral",
         {{"variant", "virtual"}, {"hyper", desk_predictor_hyper()}}},
        {"rotation",
         {{"corpus", rotation::CorpusParams{}},
          {"preprocess", rotation::PreprocessConfig{}},
          {"timegan", rotation::to_json(desk_timegan_hyper())},
          {"max_train_windows", 5000},
          {"fft", {{"length", rotation::kFftDefaultLength}, {"series", 10}}},
          {"generate", {{"multiplier", 10}}},
          {"selection", {{"mode", "val_kl"}, {"fixed_epoch", 0}, {"val_fraction", 0.2}, {"min_windows", 1000}}}}},
        {"metrics", {{"bucket_width", 10.0}, {"kl_eps", 1e-9}}},
        {"beam", {{"ap", {7.5, 7.5}}, {"beamwidth", 10.0}}},
        {"pipeline", {{"users", {1, 2, 3}}, {"paths", {"straight", "random"}}}},
    };
}

/// Smaller pipeline for smoke runs and determinism checks.
inline json quick_patch()
{
    return {{"sim", {{"duration", 60.0}}},
            {"lateral", {{"hyper", {{"max_epochs", 3}, {"hidden", {8}}, {"min_windows", 200}}}}},
            {"rotation",
             {{"corpus", {{"sessions", 2}, {"duration", 60.0}}},
              {"preprocess", {{"n_quantiles", 500}}},
              {"timegan",
               {{"hidden", 4}, {"latent", 4}, {"layers", 1}, {"embedding_epochs", 1}, {"supervised_epochs", 1},
                {"joint_epochs", 2}, {"checkpoint_every", 1}}},
              {"max_train_windows", 1000},
              {"fft", {{"length", 3000}, {"series", 2}}},
              {"generate", {{"multiplier", 1}}},
              {"selection", {{"min_windows", 200}}}}},
            {"pipeline", {{"users", {1, 2}}, {"paths", {"straight"}}}}};
}

/// Reports the first key present in @p user but not in @p defaults, as a JSON pointer path.
inline void check_known_keys(const json& user, const json& defaults, const std::string& path = "")
{
    if (!user.is_object())
        return;
    if (!defaults.is_object())
        throw ConfigError("config: '" + path + "' is not a section");
    for (auto it = user.begin(); it != user.end(); ++it) {
        const std::string p = path + "/" + it.key();
        if (!defaults.contains(it.key()))
            throw ConfigError("config: unknown key '" + p + "'");
        // Leaf objects in the defaults (none at present) would accept anything; sections recurse.
        if (defaults.at(it.key()).is_object())
            check_known_keys(it.value(), defaults.at(it.key()), p);
    }
}

/// Defaults, then the optional quick patch, then the user's patch.
inline json resolve_config(const json& user, bool quick = false)
{
    json cfg = default_config();
    check_known_keys(user, cfg);
    if (quick)
        cfg.merge_patch(quick_patch());
    cfg.merge_patch(user);
    return cfg;
}

inline json load_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config: cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config: '" + path + "' is not valid JSON: " + e.what());
    }
}

/// Wraps nlohmann type errors (wrong value types in a user file) as configuration errors.
template <class F>
auto config_guard(F&& f) -> decltype(f())
{
    try {
        return f();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

inline lateral::Variant lateral_variant(const json& cfg)
{
    return lateral::parse_variant(cfg.at("lateral").at("variant").get<std::string>());
}

inline lateral::PredictorHyper predictor_hyper(const json& cfg)
{
    return config_guard([&] {
        auto h = cfg.at("lateral").at("hyper").get<lateral::PredictorHyper>();
        h.validate();
        return h;
    });
}

inline rotation::CorpusParams corpus_params(const json& cfg)
{
    return config_guard([&] {
        auto p = cfg.at("rotation").at("corpus").get<rotation::CorpusParams>();
        p.validate();
        return p;
    });
}

inline rotation::PreprocessConfig preprocess_config(const json& cfg)
{
    return config_guard([&] { return cfg.at("rotation").at("preprocess").get<rotation::PreprocessConfig>(); });
}

inline rotation::TimeGanHyper timegan_hyper(const json& cfg)
{
    return config_guard([&] { return rotation::timegan_hyper_from_json(cfg.at("rotation").at("timegan")); });
}

inline SelectionConfig selection_config(const json& cfg)
{
    return config_guard([&] {
        const auto& j = cfg.at("rotation").at("selection");
        SelectionConfig s;
        s.mode = j.at("mode").get<std::string>();
        s.fixed_epoch = j.at("fixed_epoch").get<int>();
        s.val_fraction = j.at("val_fraction").get<double>();
        s.min_windows = j.at("min_windows").get<std::size_t>();
        if (s.mode != "val_kl" && s.mode != "fixed")
            throw ConfigError("config: rotation.selection.mode must be 'val_kl' or 'fixed'");
        return s;
    });
}

inline double kl_eps(const json& cfg) { return cfg.at("metrics").at("kl_eps").get<double>(); }
inline double bucket_width(const json& cfg) { return cfg.at("metrics").at("bucket_width").get<double>(); }

} // namespace rdwctx::harness
