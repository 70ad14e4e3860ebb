#pragma once
/**
 * @file apf.hpp
 * @brief Repulsive artificial potential field over walls and other walkers.
 *
 * Each wall pushes along its inward normal with magnitude wall_weight/d; each
 * other walker pushes along the separation direction with magnitude
 * user_weight/d. There is no attractive term. Distances below epsilon are
 * clamped and the result is flagged as saturated.
 */

#include "rdwctx/core/angles.hpp"
#include "rdwctx/core/vec2.hpp"
#include "rdwctx/sim/environment.hpp"
#include "rdwctx/sim/user_state.hpp"

#include <span>

namespace rdwctx::sim {

struct ApfParams {
    double wall_weight{1.0};
    double user_weight{1.4};
    double epsilon{1e-6};
};

struct ForceVector {
    Vec2 f;
    bool saturated{false};

    [[nodiscard]] double magnitude() const { return f.norm(); }
    [[nodiscard]] double direction_deg() const { return heading_of(f); }
    [[nodiscard]] bool is_zero() const { return f.x == 0.0 && f.y == 0.0; }
};

inline ForceVector apf_force(const UserState& user, const Environment& env, std::span<const UserState> others,
                             const ApfParams& params = {})
{
    ForceVector out;
    for (const Wall& w : env.walls()) {
        double d = w.distance(user.phys_pos);
        if (d < params.epsilon) {
            d = params.epsilon;
            out.saturated = true;
        }
        out.f += w.inward_normal * (params.wall_weight / d);
    }
    for (const UserState& o : others) {
        const Vec2 sep = user.phys_pos - o.phys_pos;
        double d = sep.norm();
        Vec2 dir = sep.normalized();
        if (d < params.epsilon) {
            d = params.epsilon;
            out.saturated = true;
        }
        out.f += dir * (params.user_weight / d);
    }
    return out;
}

} // namespace rdwctx::sim
