#include "rdwctx/lateral/evaluation.hpp"
#include "rdwctx/lateral/windows.hpp"
#include "rdwctx/sim/session.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <functional>

using namespace rdwctx;
using namespace rdwctx::lateral;

namespace {

using PosFn = std::function<std::pair<Vec2, Vec2>(int user, std::size_t i)>;

sim::SessionTrace make_trace(int users, std::size_t n, const PosFn& pos, double rate = 20.0)
{
    sim::SessionTrace tr;
    tr.rate = rate;
    tr.num_users = users;
    tr.users.resize(static_cast<std::size_t>(users));
    for (int u = 0; u < users; ++u)
        for (std::size_t i = 0; i < n; ++i) {
            sim::TraceSample s;
            std::tie(s.phys_pos, s.virt_pos) = pos(u, i);
            tr.users[static_cast<std::size_t>(u)].push_back(s);
        }
    return tr;
}

// Positions encode the sample index so alignment can be read back.
sim::SessionTrace index_trace(int users, std::size_t n)
{
    return make_trace(users, n, [](int u, std::size_t i) {
        const double k = static_cast<double>(i);
        return std::pair{Vec2{k, 1000.0 + u}, Vec2{-k, 2000.0 + u}};
    });
}

// Straight walker per user, speed and heading chosen per user.
sim::SessionTrace straight_trace(const std::vector<double>& speeds, const std::vector<double>& headings, std::size_t n,
                                 double rate = 20.0)
{
    return make_trace(static_cast<int>(speeds.size()), n, [&](int u, std::size_t i) {
        const double s = speeds[static_cast<std::size_t>(u)] * static_cast<double>(i) / rate;
        const Vec2 p = Vec2{5.0, 5.0} + heading_vector(headings[static_cast<std::size_t>(u)]) * s;
        return std::pair{p, p};
    });
}

PredictorHyper small_hyper()
{
    PredictorHyper hp;
    hp.hidden = {8};
    hp.max_epochs = 40;
    hp.batch = 32;
    hp.lr = 5e-3;
    return hp;
}

} // namespace

TEST(Windows, CountMatchesIndexArithmetic)
{
    const auto w = build_windows(index_trace(2, 100), Variant::baseline, 20, 2);
    ASSERT_EQ(w.size(), 2u * 79u);
    EXPECT_EQ(w.front().end_index, 19u);
    EXPECT_EQ(w[78].end_index, 97u);
    EXPECT_EQ(w[79].user, 1);
}

TEST(Windows, FeatureWidthPerVariant)
{
    const auto tr = index_trace(1, 40);
    EXPECT_EQ(build_windows(tr, Variant::baseline, 20, 2).front().features.cols(), 2);
    EXPECT_EQ(build_windows(tr, Variant::virtual_context, 20, 2).front().features.cols(), 4);
}

TEST(Windows, VirtualColumnsAreOneStepAhead)
{
    const auto w = build_windows(index_trace(1, 100), Variant::virtual_context, 20, 2);
    for (const auto& win : w) {
        const double t = static_cast<double>(win.end_index);
        for (Eigen::Index k = 0; k < 20; ++k) {
            const double j = t - 19.0 + static_cast<double>(k);
            EXPECT_EQ(win.features(k, 0), j);
            EXPECT_EQ(win.features(k, 2), -(j + 1.0));
        }
        EXPECT_EQ(win.target.x, t + 2.0);
    }
}

TEST(Windows, VirtualOffsetLeaksOnlyIntoVirtualVariant)
{
    const auto a = index_trace(2, 60);
    auto b = a;
    for (auto& u : b.users)
        for (auto& s : u)
            s.virt_pos = s.virt_pos + Vec2{3.5, -1.25};
    const auto ba = build_windows(a, Variant::baseline, 20, 2), bb = build_windows(b, Variant::baseline, 20, 2);
    ASSERT_EQ(ba.size(), bb.size());
    for (std::size_t i = 0; i < ba.size(); ++i)
        EXPECT_TRUE(ba[i].features == bb[i].features);
    const auto va = build_windows(a, Variant::virtual_context, 20, 2), vb = build_windows(b, Variant::virtual_context, 20, 2);
    for (std::size_t i = 0; i < va.size(); ++i) {
        EXPECT_TRUE(va[i].features.leftCols(2) == vb[i].features.leftCols(2));
        EXPECT_FALSE(va[i].features.rightCols(2) == vb[i].features.rightCols(2));
    }
}

TEST(Windows, TargetIndexNeverInsideFeatures)
{
    for (const auto v : {Variant::baseline, Variant::virtual_context})
        for (const auto& w : build_windows(index_trace(1, 80), v, 20, 2))
            for (Eigen::Index k = 0; k < w.features.rows(); ++k)
                EXPECT_LT(w.features(k, 0), w.target.x);
}

TEST(Windows, ShortTraceWarns)
{
    std::string warning;
    EXPECT_TRUE(build_windows(index_trace(1, 22), Variant::baseline, 20, 2, &warning).empty());
    EXPECT_FALSE(warning.empty());
    EXPECT_EQ(build_windows(index_trace(1, 23), Variant::baseline, 20, 2).size(), 2u);
}

TEST(Windows, ResetFlagCoversHistoryAndHorizon)
{
    auto tr = index_trace(1, 50);
    tr.users[0][30].in_reset = true;
    for (const auto& w : build_windows(tr, Variant::baseline, 20, 2)) {
        const bool expect = w.end_index + 1 - 20 <= 30 && 30 <= w.end_index + 2;
        EXPECT_EQ(w.in_reset, expect) << w.end_index;
    }
}

TEST(Encoding, StraightWalkerIsFrameInvariant)
{
    const auto tr = straight_trace({1.0, 1.0}, {0.0, 123.0}, 40);
    const auto w = build_windows(tr, Variant::virtual_context, 20, 2);
    const auto a = encode_window(w[0]);
    const auto b = encode_window(w[21]);
    ASSERT_EQ(a.rows.rows(), 19);
    EXPECT_LT((a.rows - b.rows).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(a.rows(5, 0), 0.05, 1e-12);
    EXPECT_NEAR(a.rows(5, 1), 0.0, 1e-12);
    EXPECT_NEAR(encode_target(w[21], b).x, 0.1, 1e-12);
    const Vec2 back = decode_prediction(b, encode_target(w[21], b));
    EXPECT_NEAR(back.x, w[21].target.x, 1e-12);
    EXPECT_NEAR(back.y, w[21].target.y, 1e-12);
}

TEST(Encoding, StationaryHistoryUsesIdentityFrame)
{
    const auto tr = make_trace(1, 30, [](int, std::size_t) { return std::pair{Vec2{2, 3}, Vec2{2, 3}}; });
    const auto e = encode_window(build_windows(tr, Variant::virtual_context, 20, 2).front());
    EXPECT_EQ(e.frame_deg, 0.0);
    EXPECT_EQ(e.rows.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Predictor, ConstantVelocityValidationError)
{
    const auto w = build_windows(straight_trace({1.0, 1.0}, {10.0, -100.0}, 400), Variant::baseline, 20, 2);
    TrainingLog log;
    const auto m = train_predictor(w, small_hyper(), Seed{3}, &log);
    EXPECT_LT(log.best_val_se, 1e-6);
    EXPECT_GT(log.val_windows, 0u);
}

TEST(Predictor, StationaryDataPredictsLastPosition)
{
    const auto tr = make_trace(1, 600, [](int, std::size_t) { return std::pair{Vec2{4, 7}, Vec2{1, 1}}; });
    const auto w = build_windows(tr, Variant::baseline, 20, 2);
    const auto m = train_predictor(w, small_hyper(), Seed{5});
    const Vec2 p = m.predict(w[100]);
    EXPECT_LT(squared_error(p, {4, 7}), 1e-8);
}

TEST(Predictor, StraightLineExtrapolation)
{
    std::vector<double> speeds, headings;
    for (int u = 0; u < 8; ++u) {
        speeds.push_back(0.5 + 1.0 * u / 7.0);
        headings.push_back(45.0 * u);
    }
    const auto w = build_windows(straight_trace(speeds, headings, 120), Variant::baseline, 20, 2);
    auto hp = small_hyper();
    hp.max_epochs = 200;
    hp.patience = 20;
    const auto m = train_predictor(w, hp, Seed{11});

    const auto probe = build_windows(straight_trace({1.1}, {37.0}, 40), Variant::baseline, 20, 2);
    const auto& win = probe[5];
    const Vec2 last{win.features(19, 0), win.features(19, 1)};
    const Vec2 analytic = last + heading_vector(37.0) * (1.1 * 2.0 / 20.0);
    EXPECT_LT((m.predict(win) - analytic).norm(), 1e-3);
}

TEST(Predictor, DeterministicAndSerialisable)
{
    const auto w = build_windows(straight_trace({0.8, 1.2}, {0.0, 90.0}, 320), Variant::virtual_context, 20, 2);
    auto hp = small_hyper();
    hp.max_epochs = 5;
    auto a = train_predictor(w, hp, Seed{9});
    auto b = train_predictor(w, hp, Seed{9});
    EXPECT_EQ(to_json(a).dump(), to_json(b).dump());

    const auto c = predictor_from_json(nlohmann::json::parse(to_json(a).dump()));
    const Vec2 pa = a.predict(w[42]), pc = c.predict(w[42]);
    EXPECT_EQ(pa.x, pc.x);
    EXPECT_EQ(pa.y, pc.y);
    EXPECT_EQ(a.predict(w[42]).x, pa.x);
}

TEST(Predictor, RejectsBadInput)
{
    const auto w = build_windows(straight_trace({1.0}, {0.0}, 200), Variant::baseline, 20, 2);
    EXPECT_THROW(train_predictor(w, small_hyper(), Seed{1}), ConfigError); // under 500 windows

    const auto big = build_windows(straight_trace({1.0, 1.0}, {0.0, 45.0}, 300), Variant::baseline, 20, 2);
    auto hp = small_hyper();
    hp.max_epochs = 2;
    const auto m = train_predictor(big, hp, Seed{1});
    const auto v = build_windows(straight_trace({1.0}, {0.0}, 40), Variant::virtual_context, 20, 2);
    EXPECT_THROW((void)m.predict(v[0]), ContractViolation);

    auto poisoned = big;
    poisoned[3].features(4, 0) = std::nan("");
    EXPECT_THROW(train_predictor(poisoned, hp, Seed{1}), TrainingError);
}

TEST(SquaredError, Examples)
{
    EXPECT_EQ(squared_error({0.3, -0.2}, {0.3, -0.2}), 0.0);
    EXPECT_EQ(squared_error({1, 0}, {0, 0}), 1.0);
}

TEST(SeReport, AggregatesPerUser)
{
    const auto w = build_windows(index_trace(2, 24), Variant::baseline, 20, 2);
    ASSERT_EQ(w.size(), 6u);
    std::vector<Vec2> preds;
    for (std::size_t i = 0; i < w.size(); ++i)
        preds.push_back(w[i].target + Vec2{static_cast<double>(i), 0.0});
    const auto r = se_report(w, preds, Variant::baseline, 2, 20.0, {2, "random", "x"});
    // user 0 SEs 0,1,4; user 1 SEs 9,16,25
    EXPECT_DOUBLE_EQ(r.per_user.at(0).mean, 5.0 / 3.0);
    EXPECT_DOUBLE_EQ(r.per_user.at(1).median, 16.0);
    EXPECT_DOUBLE_EQ(r.aggregate.mean, 55.0 / 6.0);
    EXPECT_DOUBLE_EQ(r.aggregate.median, 6.5);
    EXPECT_DOUBLE_EQ(r.aggregate.p25, 1.75); // position 1.25 between 1 and 4
    EXPECT_DOUBLE_EQ(r.aggregate.max, 25.0);
    EXPECT_DOUBLE_EQ(r.horizon_seconds(), 0.1);
    const auto j = to_json(r);
    EXPECT_EQ(j["scenario"]["num_users"], 2);
    EXPECT_EQ(j["per_user"]["1"]["count"], 3);
}

TEST(SeReport, EmptyInputIsAnError)
{
    PredictorModel m;
    EXPECT_THROW(eval_se(m, {}), DomainError);
}
