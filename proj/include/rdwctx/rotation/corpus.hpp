#pragma once
/**
 * @file corpus.hpp
 * @brief Seeded synthetic ground-truth head-rotation corpus.
 *
 * Yaw dwells around one of a few modes (default -90, 0, +90) with a von
 * Mises offset per fixation and swings smoothly between them; pitch and
 * roll are Ornstein-Uhlenbeck processes. A two-pole smoother keeps the
 * energy of every channel well below 5 Hz.
 */

#include "rdwctx/core/random.hpp"
#include "rdwctx/rotation/series.hpp"

#include <cmath>
#include <vector>

namespace rdwctx::rotation {

struct CorpusParams {
    int sessions{6};
    double duration{120.0}; ///< seconds per session
    double rate{250.0};
    std::vector<double> yaw_modes{-90.0, 0.0, 90.0};
    double yaw_kappa{60.0};       ///< von Mises concentration of the per-fixation offset
    double mean_dwell{2.0};       ///< seconds, exponential
    double min_dwell{0.6};
    double swing_time{0.12};      ///< smoother time constant per pole
    double jitter_sigma{2.0};     ///< degrees, fixational micro-movement
    double jitter_tau{0.3};
    double pitch_mean{-5.0};
    double pitch_sigma{8.0};
    double pitch_tau{1.2};
    double roll_sigma{4.0};
    double roll_tau{1.0};

    void validate() const
    {
        if (sessions < 1 || !(duration > 0.0) || !(rate > 0.0))
            throw ConfigError("corpus: sessions, duration and rate must be positive");
        if (yaw_modes.empty())
            throw ConfigError("corpus: at least one yaw mode is required");
        if (!(mean_dwell > 0.0) || !(swing_time > 0.0) || !(jitter_tau > 0.0) || !(pitch_tau > 0.0) || !(roll_tau > 0.0))
            throw ConfigError("corpus: time constants must be positive");
    }
};

namespace detail {

/// Exact discretisation of an OU process with stationary std sigma.
class OrnsteinUhlenbeck {
public:
    OrnsteinUhlenbeck(double mean, double sigma, double tau, double dt, Rng& rng)
        : mean_(mean), a_(std::exp(-dt / tau)), s_(sigma * std::sqrt(1.0 - a_ * a_)), x_(mean + sigma * rng.normal())
    {
    }
    double next(Rng& rng)
    {
        x_ = mean_ + a_ * (x_ - mean_) + s_ * rng.normal();
        return x_;
    }

private:
    double mean_, a_, s_, x_;
};

} // namespace detail

inline RotationSeries generate_session(const CorpusParams& p, Seed seed)
{
    p.validate();
    Rng rng(seed);
    const double dt = 1.0 / p.rate;
    const auto n = static_cast<std::size_t>(std::llround(p.duration * p.rate));

    detail::OrnsteinUhlenbeck jitter(0.0, p.jitter_sigma, p.jitter_tau, dt, rng);
    detail::OrnsteinUhlenbeck pitch(p.pitch_mean, p.pitch_sigma, p.pitch_tau, dt, rng);
    detail::OrnsteinUhlenbeck roll(0.0, p.roll_sigma, p.roll_tau, dt, rng);

    auto mode = static_cast<std::size_t>(rng.below(p.yaw_modes.size()));
    auto fixation = [&] { return p.yaw_modes[mode] + rng.von_mises_deg(0.0, p.yaw_kappa); };
    double target = fixation();
    double dwell_left = std::max(p.min_dwell, -p.mean_dwell * std::log(1.0 - rng.uniform()));
    double s1 = target, s2 = target;
    const double alpha = 1.0 - std::exp(-dt / p.swing_time);

    RotationSeries s;
    s.rate = p.rate;
    s.yaw.reserve(n);
    s.pitch.reserve(n);
    s.roll.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        dwell_left -= dt;
        if (dwell_left <= 0.0) {
            if (p.yaw_modes.size() > 1) {
                const auto step = 1 + rng.below(p.yaw_modes.size() - 1);
                mode = (mode + step) % p.yaw_modes.size();
            }
            target = fixation();
            dwell_left = std::max(p.min_dwell, -p.mean_dwell * std::log(1.0 - rng.uniform()));
        }
        s1 += alpha * (target - s1);
        s2 += alpha * (s1 - s2);
        s.yaw.push_back(wrap_angle(s2 + jitter.next(rng)));
        s.pitch.push_back(wrap_angle(pitch.next(rng)));
        s.roll.push_back(wrap_angle(roll.next(rng)));
    }
    return s;
}

inline std::vector<RotationSeries> generate_corpus(const CorpusParams& p, Seed seed)
{
    std::vector<RotationSeries> out;
    for (int k = 0; k < p.sessions; ++k)
        out.push_back(generate_session(p, derive_seed(seed, static_cast<std::uint64_t>(k))));
    return out;
}

} // namespace rdwctx::rotation
