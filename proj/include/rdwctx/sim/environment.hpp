#pragma once

#include "rdwctx/core/errors.hpp"
#include "rdwctx/core/vec2.hpp"

#include <algorithm>
#include <array>
#include <string>

namespace rdwctx::sim {

/// One side of the tracked space: points p with inward_normal·p >= offset are inside.
struct Wall {
    Vec2 a, b;
    Vec2 inward_normal;
    /// Perpendicular distance from @p p to the wall line (positive inside).
    [[nodiscard]] double distance(const Vec2& p) const { return inward_normal.dot(p - a); }
};

/// Empty axis-aligned square [0, side]² shared by 1..3 walkers.
struct Environment {
    double side{15.0};
    int num_users{1};

    void validate() const
    {
        if (!(side > 0.0))
            throw ConfigError("environment: side must be positive");
        if (num_users < 1 || num_users > 3)
            throw ConfigError("environment: num_users must be in 1..3");
    }

    [[nodiscard]] std::array<Wall, 4> walls() const
    {
        return {{
            {{0.0, 0.0}, {side, 0.0}, {0.0, 1.0}},   // south
            {{side, 0.0}, {side, side}, {-1.0, 0.0}}, // east
            {{side, side}, {0.0, side}, {0.0, -1.0}}, // north
            {{0.0, side}, {0.0, 0.0}, {1.0, 0.0}},   // west
        }};
    }

    [[nodiscard]] bool contains(const Vec2& p) const
    {
        return p.x >= 0.0 && p.x <= side && p.y >= 0.0 && p.y <= side;
    }

    [[nodiscard]] double wall_distance(const Vec2& p) const
    {
        return std::min({p.x, side - p.x, p.y, side - p.y});
    }

    [[nodiscard]] Vec2 center() const { return {side / 2.0, side / 2.0}; }
};

/// Limits below which redirection stays imperceptible.
struct NoticeabilityThresholds {
    double min_curvature_radius{22.0}; ///< meters
    double rotation_gain_low{0.67};
    double rotation_gain_high{1.24};
    double translation_gain_low{0.86};
    double translation_gain_high{1.26};

    void validate() const
    {
        if (!(min_curvature_radius > 0.0))
            throw ConfigError("thresholds: min_curvature_radius must be positive");
        if (!(rotation_gain_low > 0.0 && rotation_gain_low <= 1.0 && rotation_gain_high >= 1.0))
            throw ConfigError("thresholds: rotation gain range must satisfy 0 < low <= 1 <= high");
        if (!(translation_gain_low > 0.0 && translation_gain_low <= 1.0 && translation_gain_high >= 1.0))
            throw ConfigError("thresholds: translation gain range must satisfy 0 < low <= 1 <= high");
    }
};

} // namespace rdwctx::sim
