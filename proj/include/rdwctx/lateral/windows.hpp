#pragma once
/**
 * @file windows.hpp
 * @brief Supervised samples for short-term lateral movement prediction.
 *
 * A window ending at sample t holds L rows for steps t-L+1 .. t and targets
 * the physical position at t+H. Row j of a virtual-variant window contains
 * phys(j) and virt(j+1): the redirection controller already knows where the
 * walker will be in the virtual environment one step ahead.
 */

#include "rdwctx/core/errors.hpp"
#include "rdwctx/core/vec2.hpp"
#include "rdwctx/nn/tensor.hpp"
#include "rdwctx/sim/session.hpp"

#include <string>
#include <vector>

namespace rdwctx::lateral {

enum class Variant { baseline, virtual_context };

inline std::string to_string(Variant v) { return v == Variant::baseline ? "baseline" : "virtual"; }

inline Variant parse_variant(const std::string& s)
{
    if (s == "baseline")
        return Variant::baseline;
    if (s == "virtual")
        return Variant::virtual_context;
    throw ConfigError("unknown variant '" + s + "' (expected baseline|virtual)");
}

inline int feature_dim(Variant v) { return v == Variant::baseline ? 2 : 4; }

struct FeatureWindow {
    Variant variant{Variant::baseline};
    int user{0};
    std::size_t end_index{0};
    nn::Matrix features; ///< [L x D]: phys x, y (, virt x, y one step ahead)
    Vec2 target;         ///< physical position at end_index + H
    bool in_reset{false}; ///< any reset sample between the first row and the target
};

/**
 * One window per user per valid end index t in [L-1, N-1-H]. A trace that is
 * too short yields an empty list and, if @p warning is given, a message.
 */
inline std::vector<FeatureWindow> build_windows(const sim::SessionTrace& trace, Variant variant, int lookback,
                                                int horizon, std::string* warning = nullptr)
{
    require(lookback >= 1 && horizon >= 1, "build_windows: lookback and horizon must be >= 1");
    std::vector<FeatureWindow> out;
    const std::size_t n = trace.length();
    const auto L = static_cast<std::size_t>(lookback);
    const auto H = static_cast<std::size_t>(horizon);
    if (n <= L + H) {
        if (warning)
            *warning = "trace has " + std::to_string(n) + " samples; need more than " + std::to_string(L + H);
        return out;
    }
    const int D = feature_dim(variant);
    for (std::size_t u = 0; u < trace.users.size(); ++u) {
        const auto& s = trace.users[u];
        for (std::size_t t = L - 1; t + H < n; ++t) {
            FeatureWindow w;
            w.variant = variant;
            w.user = static_cast<int>(u);
            w.end_index = t;
            w.features.resize(lookback, D);
            for (std::size_t k = 0; k < L; ++k) {
                const std::size_t j = t + 1 - L + k;
                w.features(static_cast<Eigen::Index>(k), 0) = s[j].phys_pos.x;
                w.features(static_cast<Eigen::Index>(k), 1) = s[j].phys_pos.y;
                if (variant == Variant::virtual_context) {
                    w.features(static_cast<Eigen::Index>(k), 2) = s[j + 1].virt_pos.x;
                    w.features(static_cast<Eigen::Index>(k), 3) = s[j + 1].virt_pos.y;
                }
            }
            w.target = s[t + H].phys_pos;
            for (std::size_t j = t + 1 - L; j <= t + H && !w.in_reset; ++j)
                w.in_reset = s[j].in_reset;
            out.push_back(std::move(w));
        }
    }
    return out;
}

} // namespace rdwctx::lateral
