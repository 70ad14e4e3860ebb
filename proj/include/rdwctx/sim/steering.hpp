#pragma once
/**
 * @file steering.hpp
 * @brief One tick of imperceptible redirection.
 *
 * The walker advances speed·dt meters along its virtual path. The physical
 * step is the virtual step modified by three gains:
 *  - curvature: bends the physical heading toward the APF force direction,
 *    |curvature| <= 1 / min_curvature_radius;
 *  - rotation: scales virtual turns, only while the virtual heading changes;
 *  - translation: shortens the physical step when walking against the force
 *    (never lengthens it).
 */

#include "rdwctx/core/angles.hpp"
#include "rdwctx/sim/apf.hpp"
#include "rdwctx/sim/environment.hpp"
#include "rdwctx/sim/user_state.hpp"
#include "rdwctx/sim/virtual_path.hpp"

#include <algorithm>
#include <cmath>

namespace rdwctx::sim {

struct SteeringParams {
    /// Desired curvature (1/m) per unit force magnitude per radian of misalignment.
    double curvature_response{1.0};
    /// Force magnitude (1/m) at which rotation and translation gains reach their limits.
    double force_reference{1.0};
};

struct AppliedGains {
    double curvature{0.0};   ///< 1/m, signed, positive turns counter-clockwise
    double rotation{1.0};
    double translation{1.0};

    [[nodiscard]] bool legal(const NoticeabilityThresholds& t, double tol = 1e-12) const
    {
        const bool curv = curvature == 0.0 || std::abs(1.0 / curvature) >= t.min_curvature_radius * (1.0 - tol);
        return curv && rotation >= t.rotation_gain_low - tol && rotation <= t.rotation_gain_high + tol &&
               translation >= t.translation_gain_low - tol && translation <= t.translation_gain_high + tol;
    }
};

struct StepResult {
    UserState state;
    AppliedGains gains;
};

inline StepResult steer_step(const UserState& user, const VirtualPath& path, const ForceVector& force,
                             const NoticeabilityThresholds& thr, double dt, const SteeringParams& params = {})
{
    require(dt > 0.0, "steer_step: dt must be positive");
    require(!user.in_reset, "steer_step: walker is executing a reset");

    StepResult r{user, {}};
    UserState& s = r.state;
    AppliedGains& g = r.gains;

    const double step = user.speed * dt;
    const double heading_before = path.heading_at(user.path_distance);
    const double heading_after = path.heading_at(user.path_distance + step);
    const double virtual_turn = heading_after - heading_before;

    const double magnitude = force.magnitude();
    if (magnitude > 0.0) {
        const double weight = std::min(1.0, magnitude / params.force_reference);
        const double misalign = angle_diff(force.direction_deg(), user.phys_heading);

        const double kmax = 1.0 / thr.min_curvature_radius;
        g.curvature = std::clamp(params.curvature_response * magnitude * deg2rad(misalign), -kmax, kmax);

        if (virtual_turn != 0.0) {
            const bool helps = (virtual_turn > 0.0) == (misalign > 0.0);
            g.rotation = helps ? 1.0 + (thr.rotation_gain_high - 1.0) * weight
                               : 1.0 - (1.0 - thr.rotation_gain_low) * weight;
        }

        const double approach = -std::cos(deg2rad(misalign));
        if (approach > 0.0)
            g.translation = 1.0 - (1.0 - thr.translation_gain_low) * weight * approach;
    }

    const double phys_step = g.translation * step;
    s.phys_heading = user.phys_heading + g.rotation * virtual_turn + rad2deg(g.curvature * phys_step);
    s.phys_pos = user.phys_pos + heading_vector(s.phys_heading) * phys_step;
    s.virt_heading = heading_after;
    s.virt_pos = user.virt_pos + heading_vector(heading_after) * step;
    s.path_distance = user.path_distance + step;
    return r;
}

} // namespace rdwctx::sim
