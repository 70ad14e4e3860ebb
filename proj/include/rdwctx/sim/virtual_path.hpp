#pragma once
/**
 * @file virtual_path.hpp
 * @brief Virtual-environment paths the simulated walkers are told to follow.
 *
 * A path is parameterised by arc length: heading_at(s) gives the virtual
 * heading after walking s meters. The virtual environment is open, so paths
 * never end; past the tabulated length the last heading is held.
 */

#include "rdwctx/core/angles.hpp"
#include "rdwctx/core/errors.hpp"
#include "rdwctx/core/random.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace rdwctx::sim {

enum class PathKind { straight, random_curved };

inline PathKind parse_path_kind(const std::string& s)
{
    if (s == "straight")
        return PathKind::straight;
    if (s == "random" || s == "random_curved")
        return PathKind::random_curved;
    throw ConfigError("unknown path kind '" + s + "' (expected straight|random)");
}

inline std::string to_string(PathKind k) { return k == PathKind::straight ? "straight" : "random"; }

struct PathParams {
    double max_curvature_deg_per_m{30.0};  ///< hard bound on |dψ/ds|
    double curvature_sigma_deg_per_m{15.0}; ///< stationary std of the curvature process
    double correlation_length_m{3.0};
    double resolution_m{0.05};
    double nominal_speed{1.0}; ///< sizes the tabulated length

    void validate() const
    {
        if (!(max_curvature_deg_per_m > 0.0) || !(curvature_sigma_deg_per_m >= 0.0))
            throw ConfigError("path: curvature parameters must be positive");
        if (!(correlation_length_m > 0.0) || !(resolution_m > 0.0) || !(nominal_speed > 0.0))
            throw ConfigError("path: correlation length, resolution and speed must be positive");
    }
};

class VirtualPath {
public:
    VirtualPath() = default;
    VirtualPath(PathKind kind, double resolution, std::vector<double> headings)
        : kind_(kind), resolution_(resolution), headings_(std::move(headings))
    {
    }

    [[nodiscard]] PathKind kind() const { return kind_; }
    [[nodiscard]] double length() const { return resolution_ * static_cast<double>(headings_.size() - 1); }

    /// Unwrapped virtual heading (degrees) after @p s meters.
    [[nodiscard]] double heading_at(double s) const
    {
        if (headings_.size() == 1 || s <= 0.0)
            return headings_.front();
        const double pos = s / resolution_;
        const auto i = static_cast<std::size_t>(pos);
        if (i + 1 >= headings_.size())
            return headings_.back();
        const double f = pos - static_cast<double>(i);
        return headings_[i] + f * (headings_[i + 1] - headings_[i]);
    }

private:
    PathKind kind_{PathKind::straight};
    double resolution_{1.0};
    std::vector<double> headings_{0.0};
};

/**
 * Straight paths keep one constant heading. Random paths integrate an
 * Ornstein-Uhlenbeck curvature process (in arc length) clipped to
 * ±max_curvature, so heading changes are smooth and bounded.
 */
inline VirtualPath gen_virtual_path(PathKind kind, double duration_s, Seed seed, const PathParams& params = {})
{
    if (!(duration_s > 0.0))
        throw ConfigError("gen_virtual_path: duration must be positive");
    params.validate();
    Rng rng(seed);
    const double initial = rng.uniform(-180.0, 180.0);
    if (kind == PathKind::straight)
        return VirtualPath(kind, params.resolution_m, {initial});

    const double length = duration_s * params.nominal_speed * 1.5 + 10.0;
    const auto n = static_cast<std::size_t>(std::ceil(length / params.resolution_m)) + 1;
    const double ds = params.resolution_m;
    const double phi = std::exp(-ds / params.correlation_length_m);
    const double innov = params.curvature_sigma_deg_per_m * std::sqrt(1.0 - phi * phi);
    const double kmax = params.max_curvature_deg_per_m;

    std::vector<double> headings(n);
    headings[0] = initial;
    double k = std::clamp(rng.normal(0.0, params.curvature_sigma_deg_per_m), -kmax, kmax);
    for (std::size_t i = 1; i < n; ++i) {
        headings[i] = headings[i - 1] + k * ds;
        k = std::clamp(phi * k + innov * rng.normal(), -kmax, kmax);
    }
    return VirtualPath(kind, ds, std::move(headings));
}

} // namespace rdwctx::sim
