#include <gtest/gtest.h>

#include "rdwctx/harness/commands.hpp"
#include "rdwctx/harness/config.hpp"
#include "rdwctx/harness/metrics.hpp"
#include "rdwctx/harness/report.hpp"
#include "rdwctx/rotation/corpus.hpp"

#include <cmath>
#include <numeric>

using namespace rdwctx;
using namespace rdwctx::harness;

namespace {

Histogram from_masses(long first, std::vector<double> m)
{
    Histogram h;
    h.first = first;
    h.masses = std::move(m);
    h.counts.assign(h.masses.size(), 0);
    return h;
}

// Straight summation of the definition, written independently of the library.
double kl_oracle(const std::vector<double>& p, const std::vector<double>& q, double eps)
{
    bool need = false;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] > 0 && q[i] == 0)
            need = true;
    std::vector<double> qs = q;
    if (need) {
        long double z = 0;
        for (double v : q)
            z += v + eps;
        for (auto& v : qs)
            v = static_cast<double>((v + eps) / z);
    }
    long double sum = 0;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] > 0)
            sum += static_cast<long double>(p[i]) * std::log(static_cast<long double>(p[i]) / qs[i]);
    return static_cast<double>(sum);
}

} // namespace

TEST(Histogram, AllZeroSamplesGiveOneBucket)
{
    const std::vector<double> x(17, 0.0);
    const auto h = histogram_pdf(x);
    ASSERT_EQ(h.size(), 1u);
    EXPECT_EQ(h.center(0), 0.0);
    EXPECT_EQ(h.masses[0], 1.0);
}

TEST(Histogram, BucketEdgesAreHalfOpen)
{
    // [-5, 5) is bucket 0, 5 starts bucket 10, -5.000001 falls in bucket -10.
    const std::vector<double> x{-5.0, 4.999999, 5.0, -5.000001};
    const auto h = histogram_pdf(x);
    EXPECT_EQ(h.mass_at(0.0), 0.5);
    EXPECT_EQ(h.mass_at(10.0), 0.25);
    EXPECT_EQ(h.mass_at(-10.0), 0.25);
}

TEST(Histogram, CountsAreConservedAndMassesSumToOne)
{
    Rng rng(Seed{12});
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 1 + rng.below(5000);
        std::vector<double> x(n);
        for (auto& v : x)
            v = rng.uniform(-400.0, 400.0);
        for (bool wrap : {false, true}) {
            const auto h = histogram_pdf(x, 10.0, wrap);
            EXPECT_EQ(h.total(), n);
            const double s = std::accumulate(h.masses.begin(), h.masses.end(), 0.0);
            EXPECT_NEAR(s, 1.0, 1e-9);
            for (double m : h.masses)
                EXPECT_GE(m, 0.0);
        }
    }
}

TEST(Histogram, WrapMergesPlusAndMinus180)
{
    const std::vector<double> x{179.0, -179.0, 176.0, 0.0};
    const auto h = histogram_pdf(x, 10.0, true);
    EXPECT_EQ(h.mass_at(-180.0), 0.75);
    EXPECT_EQ(h.mass_at(180.0), 0.0);
    EXPECT_EQ(h.size(), 36u);
}

TEST(Histogram, SyntheticYawHasMaximaAtTheThreeModes)
{
    const auto corpus = rotation::generate_corpus({}, Seed{1});
    std::vector<double> yaw;
    for (const auto& s : corpus)
        for (double v : s.yaw)
            yaw.push_back(wrap_angle(v));
    const auto h = histogram_pdf(yaw, 10.0, true);
    for (double mode : {-90.0, 0.0, 90.0}) {
        EXPECT_GE(h.mass_at(mode), h.mass_at(mode - 10.0)) << mode;
        EXPECT_GE(h.mass_at(mode), h.mass_at(mode + 10.0)) << mode;
        EXPECT_GT(h.mass_at(mode), 3.0 * h.mass_at(mode + 45.0)) << mode;
    }
    EXPECT_LT(h.mass_at(180.0) + h.mass_at(-180.0), 0.01);
}

TEST(KlDivergence, HandComputedExample)
{
    const auto p = from_masses(0, {0.5, 0.5});
    const auto q = from_masses(0, {0.25, 0.75});
    const double expected = 0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0);
    EXPECT_NEAR(kl_divergence(p, q), expected, 1e-15);
    EXPECT_NEAR(kl_divergence(p, q), 0.14384, 1e-5);
}

TEST(KlDivergence, IdenticalIsExactlyZero)
{
    const auto p = from_masses(-3, {0.1, 0.2, 0.0, 0.7});
    EXPECT_EQ(kl_divergence(p, p), 0.0);
}

TEST(KlDivergence, MatchesBruteForceOracle)
{
    Rng rng(Seed{2024});
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t k = 2 + rng.below(40);
        std::vector<double> p(k), q(k);
        double sp = 0, sq = 0;
        for (std::size_t i = 0; i < k; ++i) {
            p[i] = rng.uniform() < 0.2 ? 0.0 : rng.uniform();
            q[i] = rng.uniform() < 0.2 ? 0.0 : rng.uniform();
            sp += p[i];
            sq += q[i];
        }
        if (sp == 0 || sq == 0)
            continue;
        for (std::size_t i = 0; i < k; ++i) {
            p[i] /= sp;
            q[i] /= sq;
        }
        const double eps = trial % 2 ? 1e-9 : 1e-3;
        EXPECT_NEAR(kl_divergence(from_masses(0, p), from_masses(0, q), eps), kl_oracle(p, q, eps), 1e-12);
    }
}

TEST(KlDivergence, GridMismatchThrows)
{
    EXPECT_THROW((void)kl_divergence(from_masses(0, {1.0}), from_masses(1, {1.0})), DomainError);
    EXPECT_THROW((void)kl_divergence(from_masses(0, {1.0}), from_masses(0, {0.5, 0.5})), DomainError);
}

TEST(KlDivergence, SampleKlAlignsGrids)
{
    const std::vector<double> a{0.0, 0.0, 10.0, 10.0}, b{0.0, 10.0, 10.0, 10.0, 20.0, 20.0, 20.0, 20.0};
    // p = (.5, .5, 0), q = (1/8, 3/8, 4/8) on buckets 0, 10, 20.
    EXPECT_NEAR(sample_kl(a, b), 0.5 * std::log(4.0) + 0.5 * std::log(0.5 / 0.375), 1e-15);
}

TEST(BeamCoverage, Examples)
{
    const auto perp = beam_coverage({1, 0}, {0, 1}, {0, 0}, 60.0);
    EXPECT_NEAR(perp.misalignment, 90.0, 1e-12);
    EXPECT_FALSE(perp.covered);

    const double expect = std::atan(0.1) * 180.0 / std::numbers::pi;
    const auto small = beam_coverage({1, 0}, {1, 0.1}, {0, 0}, 11.42);
    EXPECT_NEAR(small.misalignment, expect, 1e-12);
    EXPECT_NEAR(small.misalignment, 5.71, 5e-3);
    EXPECT_FALSE(small.covered); // needs 2 * 5.7106 = 11.4212
    EXPECT_TRUE(beam_coverage({1, 0}, {1, 0.1}, {0, 0}, 11.43).covered);

    const auto same = beam_coverage({3, 4}, {3, 4}, {1, 1}, 0.1);
    EXPECT_EQ(same.misalignment, 0.0);
    EXPECT_TRUE(same.covered);
}

TEST(BeamCoverage, Errors)
{
    EXPECT_THROW((void)beam_coverage({1, 0}, {0, 0}, {0, 0}, 10.0), DomainError);
    EXPECT_THROW((void)beam_coverage({1, 0}, {0, 1}, {0, 0}, 0.0), ConfigError);
}

TEST(Config, DefaultsRoundTripThroughConverters)
{
    const auto cfg = resolve_config(json::object());
    const auto s = session_from_json(cfg.at("sim"), Seed{3});
    EXPECT_EQ(s.duration, 300.0);
    EXPECT_EQ(s.rate, 20.0);
    EXPECT_EQ(s.seed.value, 3u);
    EXPECT_EQ(predictor_hyper(cfg).lookback, 20);
    EXPECT_EQ(corpus_params(cfg).sessions, 6);
    EXPECT_EQ(preprocess_config(cfg).window, 25);
    EXPECT_EQ(timegan_hyper(cfg).checkpoint_every, 10);
    EXPECT_EQ(selection_config(cfg).mode, "val_kl");
    EXPECT_EQ(cfg.at("rotation").at("generate").at("multiplier"), 10);
    EXPECT_EQ(cfg.at("rotation").at("fft").at("length"), 30000);
}

TEST(Config, PatchOverridesAndUnknownKeysFail)
{
    const auto cfg = resolve_config(json::parse(R"({"sim": {"env": {"num_users": 3}}, "lateral": {"variant": "baseline"}})"));
    EXPECT_EQ(session_from_json(cfg.at("sim"), Seed{1}).env.num_users, 3);
    EXPECT_EQ(lateral_variant(cfg), lateral::Variant::baseline);
    EXPECT_THROW((void)resolve_config(json::parse(R"({"sim": {"envv": {}}})")), ConfigError);
    EXPECT_THROW((void)resolve_config(json::parse(R"({"rotation": {"timegan": {"hiden": 3}}})")), ConfigError);
    const auto bad = resolve_config(json::parse(R"({"sim": {"duration": "long"}})"));
    EXPECT_THROW((void)config_guard([&] { return session_from_json(bad.at("sim"), Seed{1}); }), ConfigError);
}

TEST(Config, HashIsStableAndSensitive)
{
    const auto a = resolve_config(json::object());
    EXPECT_EQ(config_hash(a), config_hash(resolve_config(json::object())));
    EXPECT_NE(config_hash(a), config_hash(resolve_config(json::object(), true)));
    // FNV-1a reference values.
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(OutputDir, RemoveAllDeletesOnlyRegisteredFiles)
{
    const auto root = fs::temp_directory_path() / "rdwctx_outdir_test";
    fs::remove_all(root);
    fs::create_directories(root);
    {
        std::ofstream(root / "keep.txt") << "x";
    }
    OutputDir out(root);
    std::ofstream(out.file("sub/a.txt")) << "a";
    std::ofstream(out.file("b.txt")) << "b";
    out.remove_all();
    EXPECT_TRUE(fs::exists(root / "keep.txt"));
    EXPECT_FALSE(fs::exists(root / "sub"));
    EXPECT_FALSE(fs::exists(root / "b.txt"));
    fs::remove_all(root);
}
