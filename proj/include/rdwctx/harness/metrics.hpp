#pragma once
/**
 * @file metrics.hpp
 * @brief Angle histograms, KL divergence and the beam-coverage proxy.
 */

#include "rdwctx/core/angles.hpp"
#include "rdwctx/core/errors.hpp"
#include "rdwctx/core/vec2.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace rdwctx::harness {

/// Bucket k covers [k*w - w/2, k*w + w/2) and is centred on k*w.
struct Histogram {
    double width{10.0};
    long first{0}; ///< index k of counts[0]
    std::vector<std::uint64_t> counts;
    std::vector<double> masses;

    [[nodiscard]] std::size_t size() const { return counts.size(); }
    [[nodiscard]] double center(std::size_t i) const { return static_cast<double>(first + static_cast<long>(i)) * width; }
    [[nodiscard]] std::uint64_t total() const
    {
        std::uint64_t t = 0;
        for (auto c : counts)
            t += c;
        return t;
    }
    [[nodiscard]] double mass_at(double center_deg) const
    {
        const long k = std::lround(center_deg / width) - first;
        return k >= 0 && k < static_cast<long>(size()) ? masses[static_cast<std::size_t>(k)] : 0.0;
    }

    void normalize()
    {
        const auto t = static_cast<double>(total());
        masses.assign(counts.size(), 0.0);
        if (t > 0)
            for (std::size_t i = 0; i < counts.size(); ++i)
                masses[i] = static_cast<double>(counts[i]) / t;
    }
};

inline long bucket_of(double x, double width) { return static_cast<long>(std::floor((x + 0.5 * width) / width)); }

/**
 * With @p merge_wrap, samples in the bucket centred on +180 are counted in
 * the bucket centred on -180 so wrapped angles are not split across two
 * buckets that describe one direction (requires 180 to be a bucket centre).
 */
inline Histogram histogram_pdf(std::span<const double> samples, double width = 10.0, bool merge_wrap = false)
{
    if (samples.empty())
        throw DomainError("histogram_pdf: no samples");
    if (!(width > 0.0))
        throw ConfigError("histogram_pdf: bucket width must be positive");
    const double half_turn = 180.0 / width;
    if (merge_wrap && std::abs(half_turn - std::round(half_turn)) > 1e-12)
        throw ConfigError("histogram_pdf: merging the wrap bucket needs 180 to be a multiple of the width");
    const long wrap_k = std::lround(half_turn);
    long lo = 0, hi = 0;
    std::vector<long> ks;
    ks.reserve(samples.size());
    for (double x : samples) {
        if (!std::isfinite(x))
            throw DomainError("histogram_pdf: non-finite sample");
        long k = bucket_of(x, width);
        if (merge_wrap && k == wrap_k)
            k = -wrap_k;
        ks.push_back(k);
    }
    lo = *std::min_element(ks.begin(), ks.end());
    hi = *std::max_element(ks.begin(), ks.end());
    if (merge_wrap) {
        lo = std::min(lo, -wrap_k);
        hi = std::max(hi, wrap_k - 1);
    }
    Histogram h;
    h.width = width;
    h.first = lo;
    h.counts.assign(static_cast<std::size_t>(hi - lo + 1), 0);
    for (long k : ks)
        ++h.counts[static_cast<std::size_t>(k - lo)];
    h.normalize();
    return h;
}

/// Copies of a and b extended with empty buckets to a common index range.
inline std::pair<Histogram, Histogram> align(const Histogram& a, const Histogram& b)
{
    if (a.width != b.width)
        throw DomainError("align: histograms have different bucket widths");
    const long lo = std::min(a.first, b.first);
    const long hi = std::max(a.first + static_cast<long>(a.size()), b.first + static_cast<long>(b.size()));
    auto extend = [&](const Histogram& h) {
        Histogram o;
        o.width = h.width;
        o.first = lo;
        o.counts.assign(static_cast<std::size_t>(hi - lo), 0);
        for (std::size_t i = 0; i < h.size(); ++i)
            o.counts[static_cast<std::size_t>(h.first - lo) + i] = h.counts[i];
        o.masses.assign(o.counts.size(), 0.0);
        for (std::size_t i = 0; i < h.size(); ++i)
            o.masses[static_cast<std::size_t>(h.first - lo) + i] = h.masses[i];
        return o;
    };
    return {extend(a), extend(b)};
}

/**
 * KL(p || q) in nats; buckets with p = 0 contribute nothing. When some
 * bucket has p > 0 but q = 0, q is smoothed by eps per bucket and
 * renormalised; otherwise q is used as is, so KL(p || p) is exactly 0.
 */
inline double kl_divergence(const Histogram& p, const Histogram& q, double eps = 1e-9)
{
    if (p.width != q.width || p.first != q.first || p.size() != q.size())
        throw DomainError("kl_divergence: histograms are on different bucket grids");
    if (!(eps >= 0.0))
        throw ConfigError("kl_divergence: eps must be >= 0");
    bool uncovered = false;
    for (std::size_t i = 0; i < p.size(); ++i)
        uncovered = uncovered || (p.masses[i] > 0.0 && q.masses[i] <= 0.0);
    double z = 1.0;
    if (uncovered) {
        z = 0.0;
        for (double m : q.masses)
            z += m + eps;
    } else {
        eps = 0.0;
    }
    double kl = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double pi = p.masses[i];
        if (pi <= 0.0)
            continue;
        const double qi = (q.masses[i] + eps) / z;
        kl += pi * std::log(pi / qi);
    }
    return kl;
}

/// Convenience: histograms of two sample sets on a shared grid, then KL(target || other).
inline double sample_kl(std::span<const double> target, std::span<const double> other, double width = 10.0,
                        bool merge_wrap = false, double eps = 1e-9)
{
    const auto [p, q] = align(histogram_pdf(target, width, merge_wrap), histogram_pdf(other, width, merge_wrap));
    return kl_divergence(p, q, eps);
}

inline nlohmann::json to_json(const Histogram& h)
{
    std::vector<double> centers;
    for (std::size_t i = 0; i < h.size(); ++i)
        centers.push_back(h.center(i));
    return {{"bucket_width", h.width}, {"centers", centers}, {"counts", h.counts}, {"masses", h.masses}};
}

struct BeamCoverage {
    bool covered{false};
    double misalignment{0.0}; ///< degrees, in [0, 180]
};

inline BeamCoverage beam_coverage(Vec2 pred, Vec2 true_pos, Vec2 ap, double beamwidth)
{
    if (!(beamwidth > 0.0))
        throw ConfigError("beam_coverage: beamwidth must be positive");
    const Vec2 rt = true_pos - ap, rp = pred - ap;
    if (rt.norm() == 0.0)
        throw DomainError("beam_coverage: true position coincides with the access point");
    if (rp.norm() == 0.0)
        throw DomainError("beam_coverage: predicted position coincides with the access point");
    BeamCoverage c;
    c.misalignment = std::abs(std::atan2(rp.cross(rt), rp.dot(rt))) * 180.0 / kPi;
    c.covered = c.misalignment <= beamwidth / 2.0;
    return c;
}

} // namespace rdwctx::harness
