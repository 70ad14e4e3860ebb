#include "rdwctx/core/angles.hpp"
#include "rdwctx/core/random.hpp"
#include "rdwctx/core/vec2.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

using namespace rdwctx;

namespace {

// Oracle: pick the shift 360k (|k| <= 3) that minimises the step from the previous output.
std::vector<double> unwrap_by_search(const std::vector<double>& in)
{
    std::vector<double> out;
    for (std::size_t i = 0; i < in.size(); ++i) {
        if (i == 0) {
            out.push_back(in[0]);
            continue;
        }
        double best = 0.0, best_gap = std::numeric_limits<double>::infinity();
        for (int k = -3; k <= 3; ++k) {
            const double cand = in[i] + 360.0 * k;
            const double gap = std::abs(cand - out.back());
            if (gap < best_gap) {
                best_gap = gap;
                best = cand;
            }
        }
        out.push_back(best);
    }
    return out;
}

} // namespace

TEST(WrapAngle, Examples)
{
    EXPECT_DOUBLE_EQ(wrap_angle(190.0), -170.0);
    EXPECT_DOUBLE_EQ(wrap_angle(-180.0), -180.0);
    EXPECT_DOUBLE_EQ(wrap_angle(360.0), 0.0);
    EXPECT_DOUBLE_EQ(wrap_angle(180.0), -180.0);
    EXPECT_DOUBLE_EQ(wrap_angle(-540.0), -180.0);
}

TEST(WrapAngle, NonFiniteIsDomainError)
{
    EXPECT_THROW((void)wrap_angle(std::numeric_limits<double>::quiet_NaN()), DomainError);
    EXPECT_THROW((void)wrap_angle(std::numeric_limits<double>::infinity()), DomainError);
}

TEST(WrapAngle, IdempotentAndInRange)
{
    Rng rng(Seed{11});
    for (int i = 0; i < 10000; ++i) {
        const double a = rng.uniform(-5000.0, 5000.0);
        const double w = wrap_angle(a);
        EXPECT_GE(w, -180.0);
        EXPECT_LT(w, 180.0);
        EXPECT_EQ(wrap_angle(w), w);
        EXPECT_NEAR(std::remainder(w - a, 360.0), 0.0, 1e-9);
    }
    EXPECT_LT(wrap_angle(-1e-300), 180.0);
}

TEST(UnwrapSeries, Examples)
{
    EXPECT_EQ(unwrap_series(std::vector<double>{179.0, -179.0}), (std::vector<double>{179.0, 181.0}));
    EXPECT_EQ(unwrap_series(std::vector<double>{0.0, 10.0, 20.0}), (std::vector<double>{0.0, 10.0, 20.0}));
    EXPECT_TRUE(unwrap_series(std::vector<double>{}).empty());

    const std::vector<double> in{-170.0, 175.0, 160.0};
    const auto expected = unwrap_by_search(in);
    EXPECT_EQ(expected, (std::vector<double>{-170.0, -185.0, -200.0}));
    EXPECT_EQ(unwrap_series(in), expected);
}

TEST(RewrapSeries, Examples)
{
    EXPECT_EQ(rewrap_series(std::vector<double>{179.0, 181.0}), (std::vector<double>{179.0, -179.0}));
    EXPECT_EQ(rewrap_series(std::vector<double>{0.0, 10.0}), (std::vector<double>{0.0, 10.0}));
    EXPECT_EQ(rewrap_series(std::vector<double>{-200.0}), (std::vector<double>{160.0}));
}

TEST(UnwrapSeries, PropertyRoundTripAndBoundedSteps)
{
    Rng rng(Seed{2024});
    for (int trial = 0; trial < 200; ++trial) {
        const auto n = 1 + rng.below(300);
        std::vector<double> x(n);
        double walk = rng.uniform(-180.0, 180.0);
        for (auto& v : x) {
            walk += rng.normal(0.0, trial % 2 ? 40.0 : 170.0);
            v = wrap_angle(walk);
        }
        const auto u = unwrap_series(x);
        ASSERT_EQ(u.size(), x.size());
        EXPECT_EQ(u.front(), x.front());
        for (std::size_t i = 1; i < u.size(); ++i) {
            EXPECT_LE(std::abs(u[i] - u[i - 1]), 180.0);
            EXPECT_NEAR(std::remainder(u[i] - x[i], 360.0), 0.0, 1e-9);
        }
        const auto back = rewrap_series(u);
        for (std::size_t i = 0; i < x.size(); ++i)
            EXPECT_NEAR(back[i], x[i], 1e-9);
    }
}

TEST(Rng, SameSeedSameStream)
{
    Rng a(Seed{5}), b(Seed{5}), c(Seed{6});
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const double x = a.normal();
        EXPECT_EQ(x, b.normal());
        differs |= x != c.normal();
    }
    EXPECT_TRUE(differs);
    EXPECT_NE(derive_seed(Seed{1}, 0).value, derive_seed(Seed{1}, 1).value);
}

TEST(Rng, VonMisesConcentratesAroundMean)
{
    Rng rng(Seed{3});
    double s = 0.0, c = 0.0;
    for (int i = 0; i < 20000; ++i) {
        const double a = deg2rad(rng.von_mises_deg(90.0, 8.0));
        s += std::sin(a);
        c += std::cos(a);
    }
    EXPECT_NEAR(rad2deg(std::atan2(s, c)), 90.0, 1.0);
}

TEST(Vec2, Basics)
{
    const Vec2 a{3.0, 4.0};
    EXPECT_DOUBLE_EQ(a.norm(), 5.0);
    EXPECT_EQ(Vec2{}.normalized(), Vec2{});
    EXPECT_NEAR(heading_of(rotate({1.0, 0.0}, 90.0)), 90.0, 1e-12);
    EXPECT_DOUBLE_EQ(Vec2(1, 0).cross({0, 1}), 1.0);
}
