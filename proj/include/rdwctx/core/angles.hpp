#pragma once
/**
 * @file angles.hpp
 * @brief Degree-based angle arithmetic.
 *
 * All angles in the toolkit are stored in degrees. The wrapped form lives in
 * the half-open interval [-180, 180) so every real angle has exactly one
 * wrapped representative. Radians only appear inside trig calls.
 */

#include "rdwctx/core/errors.hpp"

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace rdwctx {

inline constexpr double kPi = std::numbers::pi;

[[nodiscard]] constexpr double deg2rad(double deg) noexcept { return deg * kPi / 180.0; }
[[nodiscard]] constexpr double rad2deg(double rad) noexcept { return rad * 180.0 / kPi; }

/// Wrap to [-180, 180). Throws DomainError on NaN/inf.
[[nodiscard]] inline double wrap_angle(double deg)
{
    if (!std::isfinite(deg))
        throw DomainError("wrap_angle: non-finite angle");
    if (deg >= -180.0 && deg < 180.0)
        return deg;
    double r = std::fmod(deg + 180.0, 360.0);
    if (r < 0.0)
        r += 360.0;
    if (r >= 360.0) // r was a tiny negative that rounded up
        r -= 360.0;
    return r - 180.0;
}

/// Signed shortest rotation taking @p from onto @p to, in [-180, 180).
[[nodiscard]] inline double angle_diff(double to, double from) { return wrap_angle(to - from); }

/**
 * @brief Remove ±360° discontinuities from a wrapped angle series.
 *
 * Whenever consecutive samples jump by more than 180°, the remainder of the
 * series is shifted by a whole number of turns. The first element is kept
 * as-is and every output is congruent to its input modulo 360.
 */
[[nodiscard]] inline std::vector<double> unwrap_series(std::span<const double> wrapped)
{
    std::vector<double> out;
    out.reserve(wrapped.size());
    double shift = 0.0;
    for (std::size_t i = 0; i < wrapped.size(); ++i) {
        if (i > 0) {
            const double prev = out.back();
            const double turns = std::round((prev - (wrapped[i] + shift)) / 360.0);
            shift += 360.0 * turns;
        }
        out.push_back(wrapped[i] + shift);
    }
    return out;
}

/// Elementwise wrap_angle. Inverse of unwrap_series on wrapped inputs.
[[nodiscard]] inline std::vector<double> rewrap_series(std::span<const double> angles)
{
    std::vector<double> out;
    out.reserve(angles.size());
    for (double a : angles)
        out.push_back(wrap_angle(a));
    return out;
}

} // namespace rdwctx
