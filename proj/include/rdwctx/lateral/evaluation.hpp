#pragma once
/**
 * @file evaluation.hpp
 * @brief Squared-error reports for lateral predictors.
 */

#include "rdwctx/lateral/predictor.hpp"
#include "rdwctx/nn/serialize.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace rdwctx::lateral {

/// Squared Euclidean distance in m².
inline double squared_error(Vec2 pred, Vec2 target) { return (pred - target).squared_norm(); }

/// Linear-interpolated percentile (q in [0, 100]) of a sorted sample.
inline double percentile_sorted(std::span<const double> sorted, double q)
{
    require(!sorted.empty(), "percentile: empty sample");
    if (sorted.size() == 1)
        return sorted.front();
    const double pos = q / 100.0 * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

struct SeStats {
    std::size_t count{0};
    double mean{0.0};
    double median{0.0};
    double p25{0.0};
    double p75{0.0};
    double p90{0.0};
    double p95{0.0};
    double max{0.0};
};

inline SeStats summarize(std::vector<double> se)
{
    require(!se.empty(), "summarize: no samples");
    SeStats s;
    s.count = se.size();
    double sum = 0.0;
    for (double v : se) // fixed order keeps the mean reproducible
        sum += v;
    s.mean = sum / static_cast<double>(se.size());
    std::sort(se.begin(), se.end());
    s.median = percentile_sorted(se, 50);
    s.p25 = percentile_sorted(se, 25);
    s.p75 = percentile_sorted(se, 75);
    s.p90 = percentile_sorted(se, 90);
    s.p95 = percentile_sorted(se, 95);
    s.max = se.back();
    return s;
}

struct SeSample {
    int user{0};
    std::size_t end_index{0};
    double se{0.0};
    bool in_reset{false};
    Vec2 pred;
};

struct ScenarioInfo {
    int num_users{1};
    std::string ve_kind{"straight"};
    std::string label;
};

struct SeReport {
    Variant variant{Variant::baseline};
    ScenarioInfo scenario;
    int horizon{2};
    double rate{20.0};
    std::vector<SeSample> samples;
    std::map<int, SeStats> per_user;
    SeStats aggregate;

    [[nodiscard]] double horizon_seconds() const { return horizon / rate; }

    /// Mean over users of the per-user mean SE.
    [[nodiscard]] double mean_of_user_means() const
    {
        double s = 0.0;
        for (const auto& [u, st] : per_user)
            s += st.mean;
        return per_user.empty() ? 0.0 : s / static_cast<double>(per_user.size());
    }
};

/// Report from precomputed predictions; predictions[i] belongs to windows[i].
inline SeReport se_report(std::span<const FeatureWindow> windows, std::span<const Vec2> predictions, Variant variant,
                          int horizon, double rate, ScenarioInfo scenario = {})
{
    if (windows.empty())
        throw DomainError("eval_se: no windows to evaluate");
    require(windows.size() == predictions.size(), "eval_se: prediction count differs from window count");
    SeReport r;
    r.variant = variant;
    r.scenario = std::move(scenario);
    r.horizon = horizon;
    r.rate = rate;
    std::map<int, std::vector<double>> by_user;
    std::vector<double> all;
    all.reserve(windows.size());
    for (std::size_t i = 0; i < windows.size(); ++i) {
        const double se = squared_error(predictions[i], windows[i].target);
        r.samples.push_back({windows[i].user, windows[i].end_index, se, windows[i].in_reset, predictions[i]});
        by_user[windows[i].user].push_back(se);
        all.push_back(se);
    }
    for (auto& [u, v] : by_user)
        r.per_user[u] = summarize(std::move(v));
    r.aggregate = summarize(std::move(all));
    return r;
}

inline SeReport eval_se(const PredictorModel& model, std::span<const FeatureWindow> windows, ScenarioInfo scenario = {})
{
    if (windows.empty())
        throw DomainError("eval_se: no windows to evaluate");
    const auto preds = model.predict_all(windows);
    return se_report(windows, preds, model.variant, model.horizon, model.rate, std::move(scenario));
}

inline nlohmann::json to_json(const SeStats& s)
{
    return {{"count", s.count}, {"mean", s.mean}, {"median", s.median}, {"p25", s.p25},
            {"p75", s.p75},     {"p90", s.p90},   {"p95", s.p95},       {"max", s.max}};
}

inline nlohmann::json to_json(const SeReport& r)
{
    nlohmann::json users = nlohmann::json::object();
    for (const auto& [u, s] : r.per_user)
        users[std::to_string(u)] = to_json(s);
    return {{"format", "rdwctx.se_report"},
            {"variant", to_string(r.variant)},
            {"scenario", {{"num_users", r.scenario.num_users}, {"ve_kind", r.scenario.ve_kind}, {"label", r.scenario.label}}},
            {"horizon_steps", r.horizon},
            {"rate_hz", r.rate},
            {"horizon_s", r.horizon_seconds()},
            {"units", "m^2"},
            {"aggregate", to_json(r.aggregate)},
            {"mean_of_user_means", r.mean_of_user_means()},
            {"per_user", users}};
}

/// Target index of a row is end_index + horizon in the evaluated trace.
inline constexpr const char* kSeCsvHeader = "user,end_index,pred_x,pred_y,se,in_reset";

inline void write_se_csv(std::ostream& os, const SeReport& r)
{
    os << kSeCsvHeader << '\n';
    char buf[128];
    for (const auto& s : r.samples) {
        std::snprintf(buf, sizeof buf, "%.9f,%.9f,%.10e", s.pred.x, s.pred.y, s.se);
        os << s.user << ',' << s.end_index << ',' << buf << ',' << (s.in_reset ? 1 : 0) << '\n';
    }
}

// Model persistence.

inline nlohmann::json to_json(PredictorModel& m)
{
    return {{"format", "rdwctx.lateral_model"},
            {"version", 1},
            {"variant", to_string(m.variant)},
            {"lookback", m.lookback},
            {"horizon", m.horizon},
            {"rate", m.rate},
            {"encoding", "ego_frame_deltas"},
            {"feature_mean", m.feature_mean},
            {"feature_std", m.feature_std},
            {"target_mean", m.target_mean},
            {"target_std", m.target_std},
            {"network", nn::to_json(m.net)}};
}

inline PredictorModel predictor_from_json(const nlohmann::json& j)
{
    if (j.value("format", "") != "rdwctx.lateral_model" || j.value("version", 0) != 1)
        throw ConfigError("lateral model: unsupported format or version");
    PredictorModel m;
    m.variant = parse_variant(j.at("variant").get<std::string>());
    m.lookback = j.at("lookback").get<int>();
    m.horizon = j.at("horizon").get<int>();
    m.rate = j.at("rate").get<double>();
    m.feature_mean = j.at("feature_mean").get<std::vector<double>>();
    m.feature_std = j.at("feature_std").get<std::vector<double>>();
    m.target_mean = j.at("target_mean").get<std::array<double, 2>>();
    m.target_std = j.at("target_std").get<std::array<double, 2>>();
    m.net = nn::network_from_json(j.at("network"));
    if (m.feature_mean.size() != static_cast<std::size_t>(feature_dim(m.variant)) ||
        m.feature_std.size() != m.feature_mean.size())
        throw ConfigError("lateral model: normalisation size does not match variant");
    return m;
}

} // namespace rdwctx::lateral
