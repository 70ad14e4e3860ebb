#pragma once

#include "rdwctx/core/vec2.hpp"

namespace rdwctx::sim {

/// Kinematic state of one walker in both the physical and the virtual frame.
struct UserState {
    int id{0};
    Vec2 phys_pos;
    double phys_heading{0.0}; ///< degrees, unwrapped
    Vec2 virt_pos;
    double virt_heading{0.0}; ///< degrees, unwrapped; path heading plus any reset rotation
    double speed{1.0};        ///< m/s along the virtual path
    double path_distance{0.0}; ///< meters walked along the virtual path

    bool in_reset{false};
    double reset_progress{0.0}; ///< physical degrees turned in the current reset
    double reset_direction{1.0}; ///< +1 counter-clockwise, -1 clockwise
    double reset_virtual{0.0};  ///< virtual degrees turned in the current reset
};

} // namespace rdwctx::sim
