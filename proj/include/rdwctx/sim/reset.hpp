#pragma once
/**
 * @file reset.hpp
 * @brief Overt resets (2:1 turns) when a collision is imminent.
 *
 * A reset fires when the walker is within trigger_distance of a wall or of
 * another walker and is heading toward it. The walker stops translating and
 * turns 180° physically in the direction of the APF force while the virtual
 * scene turns at twice the physical rate, 360° in total, so the virtual path
 * continues unchanged afterwards. Whatever misalignment remains between the
 * new physical heading and the force direction is left to ordinary steering.
 */

#include "rdwctx/core/angles.hpp"
#include "rdwctx/sim/apf.hpp"
#include "rdwctx/sim/environment.hpp"
#include "rdwctx/sim/user_state.hpp"

#include <optional>
#include <span>
#include <string>

namespace rdwctx::sim {

enum class ResetTrigger { boundary, user };

inline std::string to_string(ResetTrigger t) { return t == ResetTrigger::boundary ? "boundary" : "user"; }

struct ResetParams {
    double trigger_distance{0.5};     ///< meters
    double physical_turn_rate{90.0};  ///< degrees per second
    double physical_turn{180.0};      ///< executed physical rotation per reset
    double virtual_ratio{2.0};        ///< virtual degrees per physical degree
};

struct ResetPlan {
    ResetTrigger trigger{ResetTrigger::boundary};
    double obstacle_distance{0.0};
    /// Wrapped angle from the physical heading to the force direction.
    double target_turn{0.0};
    /// +1 counter-clockwise, -1 clockwise.
    double direction{1.0};
};

struct ResetEvent {
    int user_id{0};
    double time{0.0};
    ResetTrigger trigger{ResetTrigger::boundary};
    double target_turn{0.0};
    double physical_turn{0.0}; ///< accumulated physical rotation, degrees
    double virtual_turn{0.0};  ///< accumulated virtual rotation, degrees
    double duration{0.0};
};

inline std::optional<ResetPlan> check_reset(const UserState& user, const Environment& env,
                                            std::span<const UserState> others, const ForceVector& force,
                                            const ResetParams& params = {})
{
    const Vec2 heading = heading_vector(user.phys_heading);
    std::optional<ResetPlan> plan;
    double nearest = params.trigger_distance;

    for (const Wall& w : env.walls()) {
        const double d = w.distance(user.phys_pos);
        if (d < nearest && heading.dot(w.inward_normal) < 0.0) {
            nearest = d;
            plan = ResetPlan{ResetTrigger::boundary, d, 0.0, 1.0};
        }
    }
    for (const UserState& o : others) {
        const Vec2 sep = o.phys_pos - user.phys_pos;
        const double d = sep.norm();
        if (d < nearest && heading.dot(sep) > 0.0) {
            nearest = d;
            plan = ResetPlan{ResetTrigger::user, d, 0.0, 1.0};
        }
    }
    if (plan) {
        plan->target_turn = force.is_zero() ? -180.0 : angle_diff(force.direction_deg(), user.phys_heading);
        plan->direction = plan->target_turn >= 0.0 ? 1.0 : -1.0;
    }
    return plan;
}

} // namespace rdwctx::sim
