#pragma once
/**
 * @file session.hpp
 * @brief Multi-walker redirected-walking session.
 *
 * Tick loop (all walkers see the same snapshot of the others):
 *   apf_force -> check_reset -> steer_step, or advance an active reset.
 * Physics runs at sim_rate; the trace is sampled at rate, which must divide
 * sim_rate. A walker executing a reset does not translate.
 */

#include "rdwctx/core/errors.hpp"
#include "rdwctx/core/random.hpp"
#include "rdwctx/sim/apf.hpp"
#include "rdwctx/sim/environment.hpp"
#include "rdwctx/sim/reset.hpp"
#include "rdwctx/sim/steering.hpp"
#include "rdwctx/sim/user_state.hpp"
#include "rdwctx/sim/virtual_path.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <vector>

namespace rdwctx::sim {

/// Synthetic tester: constant preferred speed with AR(1) jitter.
struct WalkerParams {
    double preferred_speed{1.0};  ///< m/s
    double speed_sigma{0.05};     ///< stationary std of the jitter, m/s
    double speed_correlation{1.0}; ///< seconds
    double start_radius{3.0};     ///< multi-user start circle around the center
};

struct SessionConfig {
    Environment env;
    PathKind path{PathKind::straight};
    double duration{300.0}; ///< seconds
    double rate{20.0};      ///< trace rate, Hz
    double sim_rate{100.0}; ///< physics rate, Hz
    Seed seed{1};
    NoticeabilityThresholds thresholds;
    ApfParams apf;
    SteeringParams steering;
    ResetParams reset;
    WalkerParams walker;
    PathParams path_params;

    [[nodiscard]] int decimation() const { return static_cast<int>(std::lround(sim_rate / rate)); }

    void validate() const
    {
        env.validate();
        thresholds.validate();
        path_params.validate();
        if (!(duration > 0.0) || duration > 600.0)
            throw ConfigError("session: duration must be in (0, 600] seconds");
        if (rate != 10.0 && rate != 20.0 && rate != 50.0 && rate != 100.0)
            throw ConfigError("session: rate must be one of 10, 20, 50, 100 Hz");
        if (!(sim_rate >= rate) || std::abs(sim_rate / rate - decimation()) > 1e-9)
            throw ConfigError("session: sim_rate must be an integer multiple of rate");
        if (!(reset.trigger_distance > 0.0) || !(reset.physical_turn_rate > 0.0))
            throw ConfigError("session: reset trigger distance and turn rate must be positive");
        if (!(reset.physical_turn > 0.0 && reset.physical_turn < 360.0) || !(reset.virtual_ratio > 0.0))
            throw ConfigError("session: reset turn must be in (0, 360) with positive ratio");
        if (!(walker.preferred_speed > 0.0) || walker.speed_sigma < 0.0 || !(walker.speed_correlation > 0.0))
            throw ConfigError("session: walker parameters out of range");
    }
};

struct TraceSample {
    Vec2 phys_pos;
    Vec2 virt_pos;
    double phys_heading{0.0}; ///< wrapped
    double virt_heading{0.0}; ///< wrapped
    bool in_reset{false};
    AppliedGains gains;
};

struct SessionStats {
    double min_user_distance{std::numeric_limits<double>::infinity()};
    double min_wall_distance{std::numeric_limits<double>::infinity()};
    long ticks{0};
    long saturated_forces{0};
    long illegal_gains{0};
};

struct SessionTrace {
    double rate{20.0};
    int num_users{1};
    std::vector<std::vector<TraceSample>> users; ///< users[u][i]
    std::vector<ResetEvent> resets;
    SessionConfig config;
    SessionStats stats;

    [[nodiscard]] std::size_t length() const { return users.empty() ? 0 : users.front().size(); }
    [[nodiscard]] double time_at(std::size_t i) const { return static_cast<double>(i) / rate; }
};

namespace detail {

inline std::string dump_state(const std::vector<UserState>& users, double t)
{
    std::ostringstream os;
    os.precision(9);
    os << "simulator state at t=" << t << "s:";
    for (const auto& u : users)
        os << "\n  user " << u.id << " phys=(" << u.phys_pos.x << ", " << u.phys_pos.y << ") heading="
           << u.phys_heading << " virt=(" << u.virt_pos.x << ", " << u.virt_pos.y << ") speed=" << u.speed
           << " in_reset=" << u.in_reset;
    return os.str();
}

inline std::vector<UserState> initial_users(const SessionConfig& cfg, const std::vector<VirtualPath>& paths)
{
    std::vector<UserState> users(static_cast<std::size_t>(cfg.env.num_users));
    const Vec2 c = cfg.env.center();
    for (int u = 0; u < cfg.env.num_users; ++u) {
        UserState& s = users[static_cast<std::size_t>(u)];
        s.id = u;
        if (cfg.env.num_users == 1) {
            s.phys_pos = c;
        } else {
            const double a = 360.0 * u / cfg.env.num_users + 90.0;
            s.phys_pos = c + heading_vector(a) * cfg.walker.start_radius;
        }
        s.virt_pos = s.phys_pos;
        s.virt_heading = paths[static_cast<std::size_t>(u)].heading_at(0.0);
        s.phys_heading = s.virt_heading;
        s.speed = cfg.walker.preferred_speed;
    }
    return users;
}

inline TraceSample sample_of(const UserState& s, const AppliedGains& g)
{
    return {s.phys_pos, s.virt_pos, wrap_angle(s.phys_heading), wrap_angle(s.virt_heading), s.in_reset, g};
}

} // namespace detail

inline SessionTrace run_session(const SessionConfig& cfg)
{
    cfg.validate();
    const int n_users = cfg.env.num_users;
    const double dt = 1.0 / cfg.sim_rate;
    const int decim = cfg.decimation();
    const auto n_samples = static_cast<std::size_t>(std::llround(cfg.duration * cfg.rate)) + 1;
    const long n_ticks = static_cast<long>(n_samples - 1) * decim;

    std::vector<VirtualPath> paths;
    std::vector<Rng> speed_rngs;
    PathParams pp = cfg.path_params;
    pp.nominal_speed = cfg.walker.preferred_speed;
    for (int u = 0; u < n_users; ++u) {
        paths.push_back(gen_virtual_path(cfg.path, cfg.duration, derive_seed(cfg.seed, 100 + u), pp));
        speed_rngs.emplace_back(derive_seed(cfg.seed, 200 + u));
    }

    SessionTrace trace;
    trace.rate = cfg.rate;
    trace.num_users = n_users;
    trace.config = cfg;
    trace.users.assign(static_cast<std::size_t>(n_users), {});
    for (auto& v : trace.users)
        v.reserve(n_samples);

    std::vector<UserState> users = detail::initial_users(cfg, paths);
    std::vector<AppliedGains> gains(static_cast<std::size_t>(n_users));
    std::vector<std::size_t> open_event(static_cast<std::size_t>(n_users), 0);
    for (int u = 0; u < n_users; ++u)
        trace.users[static_cast<std::size_t>(u)].push_back(detail::sample_of(users[u], gains[u]));

    const double phi = std::exp(-dt / cfg.walker.speed_correlation);
    const double innov = cfg.walker.speed_sigma * std::sqrt(1.0 - phi * phi);
    const double turn_per_tick = cfg.reset.physical_turn_rate * dt;

    std::vector<UserState> others;
    others.reserve(static_cast<std::size_t>(n_users));
    for (long tick = 1; tick <= n_ticks; ++tick) {
        const double t = static_cast<double>(tick) * dt;
        const std::vector<UserState> snapshot = users;
        for (int u = 0; u < n_users; ++u) {
            auto& s = users[static_cast<std::size_t>(u)];
            auto& g = gains[static_cast<std::size_t>(u)];
            others.clear();
            for (int o = 0; o < n_users; ++o)
                if (o != u)
                    others.push_back(snapshot[static_cast<std::size_t>(o)]);

            const ForceVector force = apf_force(snapshot[u], cfg.env, others, cfg.apf);
            if (force.saturated)
                ++trace.stats.saturated_forces;

            if (!s.in_reset) {
                if (auto plan = check_reset(snapshot[u], cfg.env, others, force, cfg.reset)) {
                    s.in_reset = true;
                    s.reset_progress = 0.0;
                    s.reset_virtual = 0.0;
                    s.reset_direction = plan->direction;
                    ResetEvent ev;
                    ev.user_id = u;
                    ev.time = t;
                    ev.trigger = plan->trigger;
                    ev.target_turn = plan->target_turn;
                    trace.resets.push_back(ev);
                    open_event[static_cast<std::size_t>(u)] = trace.resets.size() - 1;
                }
            }

            if (s.in_reset) {
                const double d_phys = std::min(turn_per_tick, cfg.reset.physical_turn - s.reset_progress);
                const double d_virt = cfg.reset.virtual_ratio * d_phys;
                s.reset_progress += d_phys;
                s.reset_virtual += d_virt;
                s.phys_heading += s.reset_direction * d_phys;
                s.virt_heading += s.reset_direction * d_virt;
                g = AppliedGains{0.0, 1.0, 1.0};
                ResetEvent& ev = trace.resets[open_event[static_cast<std::size_t>(u)]];
                ev.physical_turn = s.reset_progress;
                ev.virtual_turn = s.reset_virtual;
                ev.duration = t - ev.time + dt;
                if (s.reset_progress >= cfg.reset.physical_turn - 1e-9) {
                    s.in_reset = false;
                    // Virtual scene completed a full turn: resume the path heading.
                    s.virt_heading = paths[static_cast<std::size_t>(u)].heading_at(s.path_distance);
                }
            } else {
                StepResult r = steer_step(s, paths[static_cast<std::size_t>(u)], force, cfg.thresholds, dt,
                                          cfg.steering);
                s = r.state;
                g = r.gains;
                if (!g.legal(cfg.thresholds))
                    ++trace.stats.illegal_gains;
                s.speed = std::max(0.0, cfg.walker.preferred_speed + phi * (s.speed - cfg.walker.preferred_speed) +
                                            innov * speed_rngs[static_cast<std::size_t>(u)].normal());
            }

            if (!cfg.env.contains(s.phys_pos) || !s.phys_pos.finite())
                throw SimulationError("walker " + std::to_string(u) + " left the tracked space\n" +
                                      detail::dump_state(users, t));
            trace.stats.min_wall_distance = std::min(trace.stats.min_wall_distance, cfg.env.wall_distance(s.phys_pos));
        }
        for (int a = 0; a < n_users; ++a)
            for (int b = a + 1; b < n_users; ++b)
                trace.stats.min_user_distance =
                    std::min(trace.stats.min_user_distance, distance(users[a].phys_pos, users[b].phys_pos));
        ++trace.stats.ticks;

        if (tick % decim == 0)
            for (int u = 0; u < n_users; ++u)
                trace.users[static_cast<std::size_t>(u)].push_back(detail::sample_of(users[u], gains[u]));
    }
    return trace;
}

} // namespace rdwctx::sim
