#include <gtest/gtest.h>

#include "rdwctx/nn/grad_check.hpp"
#include "rdwctx/rotation/timegan.hpp"

#include <cmath>
#include <limits>
#include <numbers>

using namespace rdwctx;
using namespace rdwctx::rotation;

namespace {

TimeGanHyper tiny_hyper()
{
    TimeGanHyper h;
    h.hidden = 4;
    h.layers = 2;
    h.latent = 3;
    h.noise_dim = 2;
    h.batch = 16;
    h.lr = 5e-3;
    h.embedding_epochs = 3;
    h.supervised_epochs = 2;
    h.joint_epochs = 2;
    h.checkpoint_every = 1;
    return h;
}

// Noisy phase-shifted sinusoids, one channel per phase offset.
std::vector<nn::Matrix> sine_windows(std::size_t n, int T, int F, std::uint64_t seed)
{
    Rng rng(Seed{seed});
    std::vector<nn::Matrix> out;
    for (std::size_t i = 0; i < n; ++i) {
        const double freq = rng.uniform(0.1, 0.3);
        const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
        nn::Matrix w(T, F);
        for (int t = 0; t < T; ++t)
            for (int c = 0; c < F; ++c)
                w(t, c) = std::sin(freq * t + phase + 0.7 * c);
        out.push_back(w);
    }
    return out;
}

nn::Sequence seq_from(const std::vector<nn::Matrix>& ws)
{
    std::vector<std::size_t> rows(ws.size());
    std::iota(rows.begin(), rows.end(), 0);
    return detail::batch_of(ws, rows);
}

nn::Sequence fixed_noise(std::size_t b, int T, int dim, std::uint64_t seed)
{
    std::vector<Seed> seeds;
    for (std::size_t i = 0; i < b; ++i)
        seeds.push_back(derive_seed(Seed{seed}, i));
    return detail::noise_batch(T, dim, seeds);
}

// Gradients here are products of many small factors; the floor keeps ~1e-7 entries out of the ratio.
const nn::GradCheckOptions kCheck{1e-5, 1e-4, 1e-5, 10000};

nn::ParamList concat(nn::ParamList a, const nn::ParamList& b)
{
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

} // namespace

TEST(TimeGanLoss, GeneratorGradientMatchesFiniteDifferences)
{
    auto h = tiny_hyper();
    // Sorting makes the marginal term kinked where untrained outputs nearly tie; it is checked on its own below.
    h.marginal_weight = 0.0;
    TimeGanModel m(h, 2, 5, Seed{3});
    const auto X = seq_from(sine_windows(6, 5, 2, 1));
    const auto Z = fixed_noise(6, 5, h.noise_dim, 2);
    auto all = concat(concat(concat(m.embedder.parameters("e"), m.recovery.parameters("r")),
                             concat(m.generator.parameters("g"), m.supervisor.parameters("s"))),
                      m.discriminator.parameters("d"));
    const auto gs = concat(m.generator.parameters("g"), m.supervisor.parameters("s"));
    const auto rep = nn::grad_check(
        gs, [&] { return generator_loss(m, X, Z, false); },
        [&] {
            nn::zero_grads(all);
            (void)generator_loss(m, X, Z, true);
        },
        kCheck);
    EXPECT_TRUE(rep.passed) << rep.worst_param << "[" << rep.worst_index << "] rel " << rep.max_rel_error;
}

TEST(TimeGanLoss, EmbedderGradientMatchesFiniteDifferences)
{
    auto h = tiny_hyper();
    TimeGanModel m(h, 2, 5, Seed{4});
    const auto X = seq_from(sine_windows(6, 5, 2, 5));
    const auto er = concat(m.embedder.parameters("e"), m.recovery.parameters("r"));
    const auto sp = m.supervisor.parameters("s");
    const auto rep = nn::grad_check(
        er, [&] { return embedder_loss(m, X, false); },
        [&] {
            nn::zero_grads(er);
            nn::zero_grads(sp);
            (void)embedder_loss(m, X, true);
        },
        kCheck);
    EXPECT_TRUE(rep.passed) << rep.worst_param << "[" << rep.worst_index << "] rel " << rep.max_rel_error;
}

TEST(TimeGanLoss, DiscriminatorGradientMatchesFiniteDifferences)
{
    auto h = tiny_hyper();
    h.d_threshold = 0.0;
    TimeGanModel m(h, 2, 5, Seed{5});
    const auto X = seq_from(sine_windows(6, 5, 2, 6));
    const auto Z = fixed_noise(6, 5, h.noise_dim, 7);
    const auto pd = m.discriminator.parameters("d");
    const auto rep = nn::grad_check(
        pd, [&] { return discriminator_loss(m, X, Z, false); },
        [&] {
            nn::zero_grads(pd);
            (void)discriminator_loss(m, X, Z, true);
        },
        kCheck);
    EXPECT_TRUE(rep.passed) << rep.worst_param << "[" << rep.worst_index << "] rel " << rep.max_rel_error;
}

TEST(TimeGanLoss, MomentLossMatchesDirectComputation)
{
    // Two steps, one channel, batch of 4 fake and 4 real.
    nn::Sequence f(2, nn::Matrix(4, 1)), r(2, nn::Matrix(4, 1));
    f[0] << 0, 1, 2, 3;
    r[0] << 0, 0, 2, 2;
    f[1] << 1, 1, 1, 1;
    r[1] << -1, 1, -1, 1;
    // step 0: mean 1.5 vs 1, std sqrt(1.25) vs 1. step 1: mean 1 vs 0, std 0 vs 1.
    const double expected =
        ((std::abs(std::sqrt(1.25 + 1e-6) - std::sqrt(1.0 + 1e-6)) + 0.5) +
         (std::abs(std::sqrt(1e-6) - std::sqrt(1.0 + 1e-6)) + 1.0)) / 2.0;
    EXPECT_NEAR(detail::moment_loss(f, r, nullptr), expected, 1e-12);
}

TEST(TimeGanLoss, MarginalLossPairsSortedValues)
{
    // Equal sizes: plotting positions line up, so fake sorted {0,1,3} meets real sorted {0,2,4}.
    nn::Sequence f(1, nn::Matrix(3, 1)), r(1, nn::Matrix(3, 1));
    f[0] << 3, 0, 1;
    r[0] << 4, 2, 0;
    nn::Sequence g;
    EXPECT_NEAR(detail::marginal_loss(f, r, &g), (0.0 + 1.0 + 1.0) / 3.0, 1e-15);
    EXPECT_NEAR(g[0](0, 0), 2.0 * (3 - 4) / 3.0, 1e-15);
    EXPECT_NEAR(g[0](1, 0), 0.0, 1e-15);
    EXPECT_NEAR(g[0](2, 0), 2.0 * (1 - 2) / 3.0, 1e-15);
    // Identical multisets in different order give zero.
    r[0] << 1, 3, 0;
    EXPECT_EQ(detail::marginal_loss(f, r, nullptr), 0.0);
}

TEST(TimeGanLoss, MarginalGradientMatchesFiniteDifferences)
{
    // Unequal fake/real sizes exercise the interpolated quantiles.
    Rng rng(Seed{9});
    nn::Sequence f(3, nn::Matrix(5, 2)), r(4, nn::Matrix(7, 2));
    for (auto& m : f)
        for (Eigen::Index i = 0; i < m.size(); ++i)
            m.data()[i] = rng.normal();
    for (auto& m : r)
        for (Eigen::Index i = 0; i < m.size(); ++i)
            m.data()[i] = rng.uniform(-2.0, 2.0);
    nn::Sequence g;
    (void)detail::marginal_loss(f, r, &g);
    const double step = 1e-7;
    for (std::size_t t = 0; t < f.size(); ++t)
        for (Eigen::Index i = 0; i < f[t].size(); ++i) {
            const double orig = f[t].data()[i];
            f[t].data()[i] = orig + step;
            const double up = detail::marginal_loss(f, r, nullptr);
            f[t].data()[i] = orig - step;
            const double down = detail::marginal_loss(f, r, nullptr);
            f[t].data()[i] = orig;
            EXPECT_NEAR(g[t].data()[i], (up - down) / (2.0 * step), 1e-7);
        }
}

TEST(TimeGanTrain, ReconstructionErrorDecreases)
{
    auto h = tiny_hyper();
    h.embedding_epochs = 8;
    const auto res = timegan_train(sine_windows(200, 6, 2, 11), h, Seed{1}, 100);
    ASSERT_EQ(res.log.recon_mse.size(), 8u);
    EXPECT_LT(res.log.recon_mse.back(), 0.5 * res.log.initial_recon_mse);
    EXPECT_LT(res.model.recon_mse, res.log.initial_recon_mse);
    EXPECT_EQ(res.log.supervised_mse.size(), 2u);
    EXPECT_EQ(res.log.d_accuracy.size(), 2u);
}

TEST(TimeGanTrain, SeededRunsAreIdentical)
{
    const auto w = sine_windows(120, 5, 3, 12);
    auto a = timegan_train(w, tiny_hyper(), Seed{8}, 100);
    auto b = timegan_train(w, tiny_hyper(), Seed{8}, 100);
    auto c = timegan_train(w, tiny_hyper(), Seed{9}, 100);
    EXPECT_EQ(a.model.to_json().dump(), b.model.to_json().dump());
    EXPECT_NE(a.model.to_json().dump(), c.model.to_json().dump());
    EXPECT_EQ(a.log.g_loss, b.log.g_loss);
}

TEST(TimeGanTrain, CheckpointsAndGeneratedShape)
{
    auto h = tiny_hyper();
    h.joint_epochs = 6;
    h.checkpoint_every = 3;
    const auto res = timegan_train(sine_windows(100, 25, 3, 13), h, Seed{2}, 100);
    ASSERT_EQ(res.checkpoints.size(), 2u);
    EXPECT_EQ(res.checkpoints[0].epoch, 3);
    EXPECT_EQ(res.checkpoints[1].epoch, 6);
    EXPECT_EQ(res.checkpoints[0].model.epoch, 3);
    const auto g = timegan_generate(res.model, 1000, Seed{4});
    ASSERT_EQ(g.size(), 1000u); // 10x the training corpus
    for (const auto& w : g) {
        ASSERT_EQ(w.rows(), 25);
        ASSERT_EQ(w.cols(), 3);
        ASSERT_TRUE(w.allFinite());
    }
}

TEST(TimeGanTrain, GenerationIgnoresBatchSizeAndSurvivesJson)
{
    auto res = timegan_train(sine_windows(100, 5, 2, 14), tiny_hyper(), Seed{3}, 100);
    const auto a = timegan_generate(res.model, 37, Seed{5});
    const auto b = timegan_generate(res.model, 37, Seed{5}, 7);
    const auto back = TimeGanModel::from_json(nlohmann::json::parse(res.model.to_json().dump()));
    const auto c = timegan_generate(back, 37, Seed{5});
    ASSERT_EQ(a.size(), 37u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        // Product kernels may round differently for other row counts.
        EXPECT_LT((a[i] - b[i]).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_EQ(a[i], c[i]);
    }
    EXPECT_NE(a[0], timegan_generate(res.model, 1, Seed{6})[0]);
}

TEST(TimeGanTrain, RejectsBadInput)
{
    EXPECT_THROW((void)timegan_train(sine_windows(50, 5, 2, 1), tiny_hyper(), Seed{1}, 100), ConfigError);
    EXPECT_THROW((void)timegan_hyper_from_json({{"hidden", 4}, {"hiden", 4}}), ConfigError);
    EXPECT_THROW((void)timegan_hyper_from_json({{"lr", 0.0}}), ConfigError);
    EXPECT_EQ(timegan_hyper_from_json({{"hidden", 5}}).hidden, 5);
    auto w = sine_windows(100, 5, 2, 1);
    w[40](2, 1) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW((void)timegan_train(w, tiny_hyper(), Seed{1}, 100), TrainingError);
}

TEST(TimeGanTrain, HeldOutDiscriminatorAccuracyOnSinusoids)
{
    TimeGanHyper h;
    h.hidden = 8;
    h.latent = 6;
    h.layers = 2;
    h.batch = 32;
    h.lr = 5e-3;
    h.embedding_epochs = 20;
    h.supervised_epochs = 10;
    h.joint_epochs = 40;
    h.marginal_weight = 0.0; // plain objective; the marginal term targets multi-modal rotation data
    const int T = 12, F = 2;
    const auto res = timegan_train(sine_windows(600, T, F, 21), h, Seed{7}, 100);
    auto m = res.model;
    const auto X = seq_from(sine_windows(400, T, F, 22)); // never seen in training
    const auto Z = fixed_noise(400, T, h.noise_dim, 23);
    double correct = 0.0, judged = 0.0;
    (void)discriminator_loss(m, X, Z, false, &correct, &judged);
    const double acc = correct / judged;
    EXPECT_GE(acc, 0.4);
    EXPECT_LE(acc, 0.75);
}
