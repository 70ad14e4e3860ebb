#include "rdwctx/sim/session.hpp"
#include "rdwctx/sim/trace_csv.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace rdwctx;
using namespace rdwctx::sim;

namespace {

UserState walker_at(Vec2 p, double heading = 0.0)
{
    UserState u;
    u.phys_pos = p;
    u.virt_pos = p;
    u.phys_heading = heading;
    u.virt_heading = heading;
    return u;
}

// Oracle for the APF: explicit per-obstacle sum written out independently.
Vec2 force_oracle(Vec2 p, double side, const std::vector<Vec2>& others)
{
    Vec2 f{1.0 / p.x - 1.0 / (side - p.x), 1.0 / p.y - 1.0 / (side - p.y)};
    for (const Vec2& o : others) {
        const double dx = p.x - o.x, dy = p.y - o.y;
        const double d = std::sqrt(dx * dx + dy * dy);
        f.x += 1.4 * dx / (d * d);
        f.y += 1.4 * dy / (d * d);
    }
    return f;
}

} // namespace

TEST(VirtualPath, StraightHasConstantHeading)
{
    const auto path = gen_virtual_path(PathKind::straight, 300.0, Seed{1});
    const double h0 = path.heading_at(0.0);
    for (double s = 0.0; s < 400.0; s += 0.37)
        EXPECT_EQ(path.heading_at(s), h0);
}

TEST(VirtualPath, RandomIsDeterministicAndBounded)
{
    PathParams pp;
    const auto a = gen_virtual_path(PathKind::random_curved, 300.0, Seed{7}, pp);
    const auto b = gen_virtual_path(PathKind::random_curved, 300.0, Seed{7}, pp);
    double max_step = 0.0, total = 0.0;
    for (double s = 0.0; s < 300.0; s += 1.0) {
        EXPECT_EQ(a.heading_at(s), b.heading_at(s));
        const double d = std::abs(a.heading_at(s + 1.0) - a.heading_at(s));
        max_step = std::max(max_step, d);
        total += d;
    }
    // one second at the nominal 1 m/s covers one meter of path
    EXPECT_LE(max_step, pp.max_curvature_deg_per_m * 1.0 + 1e-9);
    EXPECT_GT(total, 100.0);
}

TEST(VirtualPath, UnknownKindIsConfigError)
{
    EXPECT_THROW(parse_path_kind("zigzag"), ConfigError);
    EXPECT_THROW(gen_virtual_path(PathKind::straight, 0.0, Seed{1}), ConfigError);
}

TEST(ApfForce, ZeroAtCenter)
{
    Environment env;
    const auto f = apf_force(walker_at({7.5, 7.5}), env, {});
    EXPECT_EQ(f.f.x, 0.0);
    EXPECT_EQ(f.f.y, 0.0);
}

TEST(ApfForce, EastWallPushesWest)
{
    Environment env;
    const auto f = apf_force(walker_at({14.0, 7.5}), env, {});
    EXPECT_LT(f.f.x, 0.0);
    EXPECT_EQ(f.f.y, 0.0);
}

TEST(ApfForce, MutualForcesMatchOracle)
{
    Environment env;
    env.num_users = 2;
    const UserState a = walker_at({5.0, 7.5}), b = walker_at({10.0, 7.5});
    const auto fa = apf_force(a, env, std::vector<UserState>{b});
    const auto fb = apf_force(b, env, std::vector<UserState>{a});
    const Vec2 oa = force_oracle(a.phys_pos, 15.0, {b.phys_pos});
    const Vec2 ob = force_oracle(b.phys_pos, 15.0, {a.phys_pos});
    EXPECT_NEAR(fa.f.x, oa.x, 1e-12);
    EXPECT_NEAR(fa.f.y, oa.y, 1e-12);
    EXPECT_NEAR(fb.f.x, ob.x, 1e-12);
    EXPECT_NEAR(fa.f.x, -fb.f.x, 1e-12);
    EXPECT_NEAR(fa.magnitude(), fb.magnitude(), 1e-12);
    EXPECT_NEAR(fa.f.x, -0.18, 1e-12);
}

TEST(ApfForce, ClampsTinyDistances)
{
    Environment env;
    const auto f = apf_force(walker_at({0.0, 7.5}), env, {});
    EXPECT_TRUE(f.saturated);
    EXPECT_TRUE(std::isfinite(f.f.x));
    EXPECT_GT(f.f.x, 1e5);
}

TEST(SteerStep, ZeroForceLeavesPathUnmodified)
{
    const auto path = gen_virtual_path(PathKind::straight, 10.0, Seed{3});
    UserState u = walker_at({7.5, 7.5}, path.heading_at(0.0));
    const auto r = steer_step(u, path, ForceVector{}, NoticeabilityThresholds{}, 0.05);
    EXPECT_EQ(r.gains.curvature, 0.0);
    EXPECT_EQ(r.gains.rotation, 1.0);
    EXPECT_EQ(r.gains.translation, 1.0);
    const Vec2 dphys = r.state.phys_pos - u.phys_pos;
    const Vec2 dvirt = r.state.virt_pos - u.virt_pos;
    EXPECT_NEAR(dphys.x, dvirt.x, 1e-15);
    EXPECT_NEAR(dphys.y, dvirt.y, 1e-15);
}

TEST(SteerStep, OpposingForceSaturatesCurvature)
{
    const auto path = gen_virtual_path(PathKind::straight, 10.0, Seed{3});
    UserState u = walker_at({7.5, 7.5}, path.heading_at(0.0));
    ForceVector f{heading_vector(u.phys_heading + 180.0) * 2.0, false};
    NoticeabilityThresholds thr;
    const auto r = steer_step(u, path, f, thr, 0.05);
    EXPECT_NEAR(std::abs(r.gains.curvature), 1.0 / thr.min_curvature_radius, 1e-15);
    EXPECT_TRUE(r.gains.legal(thr));
    EXPECT_LT(r.gains.translation, 1.0);
}

TEST(SteerStep, SaturatedArcGeometry)
{
    // Perpendicular strong force: curvature saturates, translation stays at 1.
    const auto path = gen_virtual_path(PathKind::straight, 10.0, Seed{3});
    UserState u = walker_at({7.5, 7.5}, path.heading_at(0.0));
    u.speed = 1.0;
    ForceVector f{heading_vector(u.phys_heading + 90.0) * 5.0, false};
    const auto r = steer_step(u, path, f, NoticeabilityThresholds{}, 0.05);
    const double expected = (0.05 / 22.0) * (180.0 / 3.14159265358979323846);
    EXPECT_NEAR(r.state.phys_heading - u.phys_heading, expected, 1e-12);
    EXPECT_NEAR(expected, 0.1302, 5e-5);
    EXPECT_DOUBLE_EQ(r.gains.translation, 1.0);
}

TEST(SteerStep, RotationGainOnlyWhileVirtualTurns)
{
    PathParams pp;
    const auto path = gen_virtual_path(PathKind::random_curved, 60.0, Seed{9}, pp);
    UserState u = walker_at({3.0, 7.5}, path.heading_at(0.0));
    NoticeabilityThresholds thr;
    const auto f = apf_force(u, Environment{}, {});
    const auto r = steer_step(u, path, f, thr, 0.01);
    EXPECT_NE(r.gains.rotation, 1.0);
    EXPECT_TRUE(r.gains.legal(thr));
}

TEST(CheckReset, Triggers)
{
    Environment env;
    const ResetParams rp;
    UserState far = walker_at({7.5, 7.5}, 0.0);
    EXPECT_FALSE(check_reset(far, env, {}, apf_force(far, env, {}), rp));

    UserState near = walker_at({14.6, 7.5}, 0.0); // 0.4 m from the east wall, heading east
    const auto f = apf_force(near, env, {});
    const auto plan = check_reset(near, env, {}, f, rp);
    ASSERT_TRUE(plan);
    EXPECT_EQ(plan->trigger, ResetTrigger::boundary);
    EXPECT_NEAR(plan->obstacle_distance, 0.4, 1e-12);
    EXPECT_NEAR(std::abs(plan->target_turn), 180.0, 1e-9);

    UserState leaving = walker_at({14.6, 7.5}, 180.0);
    EXPECT_FALSE(check_reset(leaving, env, {}, apf_force(leaving, env, {}), rp));

    env.num_users = 2;
    UserState a = walker_at({7.0, 7.5}, 0.0), b = walker_at({7.4, 7.5}, 0.0);
    const auto pa = check_reset(a, env, std::vector<UserState>{b}, apf_force(a, env, std::vector<UserState>{b}), rp);
    ASSERT_TRUE(pa);
    EXPECT_EQ(pa->trigger, ResetTrigger::user);
}

TEST(RunSession, SingleUserStraightStaysInside)
{
    SessionConfig cfg;
    cfg.seed = Seed{3};
    const auto tr = run_session(cfg);
    EXPECT_EQ(tr.length(), 6001u);
    for (const auto& s : tr.users[0]) {
        EXPECT_GE(s.phys_pos.x, 0.0);
        EXPECT_LE(s.phys_pos.x, 15.0);
        EXPECT_GE(s.phys_pos.y, 0.0);
        EXPECT_LE(s.phys_pos.y, 15.0);
    }
    EXPECT_GT(tr.resets.size(), 0u);
}

TEST(RunSession, ZeroForceSymmetryOnFirstTick)
{
    SessionConfig cfg;
    cfg.rate = 100.0;
    cfg.duration = 1.0;
    const auto tr = run_session(cfg);
    EXPECT_EQ(tr.users[0][1].gains.curvature, 0.0);
}

TEST(RunSession, DeterministicBytes)
{
    SessionConfig cfg;
    cfg.env.num_users = 3;
    cfg.path = PathKind::random_curved;
    cfg.duration = 60.0;
    cfg.seed = Seed{17};
    std::ostringstream a, b;
    write_trace_csv(a, run_session(cfg));
    write_trace_csv(b, run_session(cfg));
    EXPECT_EQ(a.str(), b.str());
}

TEST(RunSession, ThreeUsersRandomResetsAndSpacing)
{
    SessionConfig cfg;
    cfg.env.num_users = 3;
    cfg.path = PathKind::random_curved;
    cfg.seed = Seed{5};
    const auto tr = run_session(cfg);
    EXPECT_GT(tr.resets.size(), 0u);
    EXPECT_GE(tr.stats.min_user_distance, 0.3);
    EXPECT_EQ(tr.stats.illegal_gains, 0);
    for (const auto& u : tr.users)
        for (const auto& s : u)
            EXPECT_TRUE(s.gains.legal(cfg.thresholds));
    for (const auto& ev : tr.resets) {
        if (ev.time + ev.duration > cfg.duration)
            continue; // still running when the session ended
        EXPECT_NEAR(ev.virtual_turn, 2.0 * ev.physical_turn, 1e-6);
        EXPECT_NEAR(ev.virtual_turn, 360.0, 1e-6);
    }
}

TEST(RunSession, ResetWalkerDoesNotTranslate)
{
    SessionConfig cfg;
    cfg.rate = 100.0;
    cfg.duration = 60.0;
    const auto tr = run_session(cfg);
    const auto& s = tr.users[0];
    int checked = 0;
    for (std::size_t i = 1; i < s.size(); ++i)
        if (s[i].in_reset && s[i - 1].in_reset) {
            EXPECT_EQ(s[i].phys_pos, s[i - 1].phys_pos);
            EXPECT_EQ(s[i].virt_pos, s[i - 1].virt_pos);
            ++checked;
        }
    EXPECT_GT(checked, 0);
}

TEST(RunSession, ConfigValidation)
{
    SessionConfig cfg;
    cfg.rate = 25.0;
    EXPECT_THROW(run_session(cfg), ConfigError);
    cfg.rate = 20.0;
    cfg.duration = 601.0;
    EXPECT_THROW(run_session(cfg), ConfigError);
    cfg.duration = 10.0;
    cfg.env.num_users = 4;
    EXPECT_THROW(run_session(cfg), ConfigError);
}

TEST(TraceCsv, HeaderAndReadBack)
{
    SessionConfig cfg;
    cfg.env.num_users = 2;
    cfg.duration = 5.0;
    const auto tr = run_session(cfg);
    std::ostringstream os;
    write_trace_csv(os, tr);
    const std::string text = os.str();
    EXPECT_EQ(text.substr(0, text.find('\n')), kTraceCsvHeader);
    std::istringstream is(text);
    const auto back = read_trace_csv(is);
    EXPECT_EQ(back.num_users, 2);
    EXPECT_EQ(back.length(), tr.length());
    EXPECT_DOUBLE_EQ(back.rate, 20.0);
    std::ostringstream again;
    write_trace_csv(again, back);
    EXPECT_EQ(again.str(), text);
}
