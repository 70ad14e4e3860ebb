#pragma once
/**
 * @file timegan.hpp
 * @brief TimeGAN on 25 x 3 rotation windows, built from GRU stacks.
 *
 * Networks (each a GRU stack with a dense head, time-major batches):
 *   embedder      X -> H       sigmoid latent
 *   recovery      H -> X~      linear (data is standard normal after the quantile transform)
 *   generator     Z -> E^      sigmoid latent, Z ~ U[0, 1]
 *   supervisor    H -> H(t+1)  sigmoid latent
 *   discriminator H -> logit   per time step
 *
 * Training runs three phases: reconstruction, supervised next-step latent,
 * then joint training where each batch takes one generator step, one
 * embedder step and one discriminator step. The discriminator step is
 * skipped while its loss is already below d_threshold.
 */

#include "rdwctx/core/random.hpp"
#include "rdwctx/nn/adam.hpp"
#include "rdwctx/nn/loss.hpp"
#include "rdwctx/nn/network.hpp"
#include "rdwctx/nn/serialize.hpp"
#include "rdwctx/rotation/series.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

namespace rdwctx::rotation {

struct TimeGanHyper {
    int hidden{24};
    int layers{3};
    int latent{24};
    int noise_dim{3};
    int batch{128};
    double lr{1e-3};
    int embedding_epochs{50};
    int supervised_epochs{50};
    int joint_epochs{100};
    int checkpoint_every{10};
    double recon_weight{10.0};
    double eta{1.0};             ///< supervised term in the generator loss
    double moment_weight{10.0};
    double marginal_weight{100.0}; ///< sorted-sample (1-D Wasserstein) match of per-channel marginals
    double gamma{1.0};           ///< weight of the adversarial loss on un-supervised latents
    double embed_supervised_weight{0.1};
    double d_threshold{0.15};
    int collapse_epochs{20};

    void validate() const
    {
        if (hidden < 1 || layers < 1 || latent < 1 || noise_dim < 1 || batch < 1)
            throw ConfigError("timegan: sizes must be >= 1");
        if (!(lr > 0.0))
            throw ConfigError("timegan: lr must be positive");
        if (embedding_epochs < 0 || supervised_epochs < 0 || joint_epochs < 0 || checkpoint_every < 1)
            throw ConfigError("timegan: epoch counts must be >= 0 and checkpoint_every >= 1");
    }
};

inline nlohmann::json to_json(const TimeGanHyper& h)
{
    return {{"hidden", h.hidden},
            {"layers", h.layers},
            {"latent", h.latent},
            {"noise_dim", h.noise_dim},
            {"batch", h.batch},
            {"lr", h.lr},
            {"embedding_epochs", h.embedding_epochs},
            {"supervised_epochs", h.supervised_epochs},
            {"joint_epochs", h.joint_epochs},
            {"checkpoint_every", h.checkpoint_every},
            {"recon_weight", h.recon_weight},
            {"eta", h.eta},
            {"moment_weight", h.moment_weight},
            {"marginal_weight", h.marginal_weight},
            {"gamma", h.gamma},
            {"embed_supervised_weight", h.embed_supervised_weight},
            {"d_threshold", h.d_threshold},
            {"collapse_epochs", h.collapse_epochs}};
}

/// Missing keys keep their defaults; unknown keys are rejected.
inline TimeGanHyper timegan_hyper_from_json(const nlohmann::json& j, TimeGanHyper h = {})
{
    const auto known = to_json(h);
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.contains(it.key()))
            throw ConfigError("timegan: unknown hyper-parameter '" + it.key() + "'");
    auto get = [&](const char* k, auto& v) {
        if (j.contains(k))
            v = j.at(k).get<std::decay_t<decltype(v)>>();
    };
    get("hidden", h.hidden);
    get("layers", h.layers);
    get("latent", h.latent);
    get("noise_dim", h.noise_dim);
    get("batch", h.batch);
    get("lr", h.lr);
    get("embedding_epochs", h.embedding_epochs);
    get("supervised_epochs", h.supervised_epochs);
    get("joint_epochs", h.joint_epochs);
    get("checkpoint_every", h.checkpoint_every);
    get("recon_weight", h.recon_weight);
    get("eta", h.eta);
    get("moment_weight", h.moment_weight);
    get("marginal_weight", h.marginal_weight);
    get("gamma", h.gamma);
    get("embed_supervised_weight", h.embed_supervised_weight);
    get("d_threshold", h.d_threshold);
    get("collapse_epochs", h.collapse_epochs);
    h.validate();
    return h;
}

struct TimeGanModel {
    TimeGanHyper hyper;
    int features{kChannels};
    int seq_len{25};
    std::uint64_t seed{0};
    int epoch{0}; ///< joint epochs completed
    double recon_mse{0.0};
    nn::SequenceNetwork embedder, recovery, generator, supervisor, discriminator;

    TimeGanModel() = default;

    TimeGanModel(const TimeGanHyper& h, int feature_dim, int length, Seed s)
        : hyper(h), features(feature_dim), seq_len(length), seed(s.value)
    {
        auto spec = [&](int in, int layers, int out, nn::Activation act) {
            return nn::NetworkSpec{nn::CellKind::gru, in, std::vector<int>(static_cast<std::size_t>(layers), h.hidden),
                                   out, act};
        };
        const auto sig = nn::Activation::sigmoid;
        embedder = nn::SequenceNetwork(spec(features, h.layers, h.latent, sig), derive_seed(s, 11));
        recovery = nn::SequenceNetwork(spec(h.latent, h.layers, features, nn::Activation::linear), derive_seed(s, 12));
        generator = nn::SequenceNetwork(spec(h.noise_dim, h.layers, h.latent, sig), derive_seed(s, 13));
        supervisor = nn::SequenceNetwork(spec(h.latent, std::max(1, h.layers - 1), h.latent, sig), derive_seed(s, 14));
        discriminator = nn::SequenceNetwork(spec(h.latent, h.layers, 1, nn::Activation::linear), derive_seed(s, 15));
    }

    [[nodiscard]] nlohmann::json to_json()
    {
        return {{"format", "rdwctx.timegan"},
                {"version", 1},
                {"features", features},
                {"seq_len", seq_len},
                {"seed", seed},
                {"epoch", epoch},
                {"recon_mse", recon_mse},
                {"noise", "uniform[0,1]"},
                {"hyper", rotation::to_json(hyper)},
                {"embedder", nn::to_json(embedder)},
                {"recovery", nn::to_json(recovery)},
                {"generator", nn::to_json(generator)},
                {"supervisor", nn::to_json(supervisor)},
                {"discriminator", nn::to_json(discriminator)}};
    }

    static TimeGanModel from_json(const nlohmann::json& j)
    {
        if (j.value("format", "") != "rdwctx.timegan" || j.value("version", 0) != 1)
            throw ConfigError("timegan model: unsupported format or version");
        TimeGanModel m;
        m.hyper = timegan_hyper_from_json(j.at("hyper"));
        m.features = j.at("features").get<int>();
        m.seq_len = j.at("seq_len").get<int>();
        m.seed = j.at("seed").get<std::uint64_t>();
        m.epoch = j.at("epoch").get<int>();
        m.recon_mse = j.at("recon_mse").get<double>();
        m.embedder = nn::network_from_json(j.at("embedder"));
        m.recovery = nn::network_from_json(j.at("recovery"));
        m.generator = nn::network_from_json(j.at("generator"));
        m.supervisor = nn::network_from_json(j.at("supervisor"));
        m.discriminator = nn::network_from_json(j.at("discriminator"));
        return m;
    }
};

struct TimeGanCheckpoint {
    int epoch{0};
    TimeGanModel model;
};

struct TimeGanLog {
    std::vector<double> recon_mse;      ///< per embedding epoch
    std::vector<double> supervised_mse; ///< per supervised epoch
    std::vector<double> g_loss, e_loss, d_loss, d_accuracy; ///< per joint epoch
    double initial_recon_mse{0.0};
    std::vector<std::string> warnings;
};

struct TimeGanResult {
    TimeGanModel model; ///< state after the last joint epoch
    std::vector<TimeGanCheckpoint> checkpoints;
    TimeGanLog log;
};

namespace detail {

inline nn::Sequence batch_of(const std::vector<nn::Matrix>& windows, std::span<const std::size_t> rows)
{
    std::vector<const nn::Matrix*> ptrs;
    ptrs.reserve(rows.size());
    for (auto r : rows)
        ptrs.push_back(&windows[r]);
    return nn::to_sequence(ptrs);
}

/// Per-window noise from its own stream so batching never changes the draw.
inline nn::Sequence noise_batch(int T, int dim, std::span<const Seed> seeds)
{
    nn::Sequence z(static_cast<std::size_t>(T), nn::Matrix(static_cast<Eigen::Index>(seeds.size()), dim));
    for (std::size_t b = 0; b < seeds.size(); ++b) {
        Rng rng(seeds[b]);
        for (int t = 0; t < T; ++t)
            for (int d = 0; d < dim; ++d)
                z[static_cast<std::size_t>(t)](static_cast<Eigen::Index>(b), d) = rng.uniform();
    }
    return z;
}

inline double seq_mse(const nn::Sequence& pred, const nn::Sequence& target, nn::Sequence* grad, double weight = 1.0)
{
    double loss = 0.0;
    const auto T = static_cast<double>(pred.size());
    if (grad)
        grad->resize(pred.size());
    for (std::size_t t = 0; t < pred.size(); ++t) {
        loss += nn::mse_loss(pred[t], target[t]) / T;
        if (grad)
            (*grad)[t] = nn::mse_grad(pred[t], target[t]) * (weight / T);
    }
    return loss;
}

/// Next-step supervised loss: S(H)[t] against H[t+1]. Gradients w.r.t. both sides if requested.
inline double next_step_mse(const nn::Sequence& sup, const nn::Sequence& h, nn::Sequence* d_sup, nn::Sequence* d_h,
                            double weight = 1.0)
{
    const std::size_t T = sup.size();
    double loss = 0.0;
    const auto n = static_cast<double>(T - 1);
    if (d_sup)
        d_sup->assign(T, nn::Matrix::Zero(sup[0].rows(), sup[0].cols()));
    if (d_h)
        d_h->assign(T, nn::Matrix::Zero(h[0].rows(), h[0].cols()));
    for (std::size_t t = 0; t + 1 < T; ++t) {
        loss += nn::mse_loss(sup[t], h[t + 1]) / n;
        const nn::Matrix g = nn::mse_grad(sup[t], h[t + 1]) * (weight / n);
        if (d_sup)
            (*d_sup)[t] = g;
        if (d_h)
            (*d_h)[t + 1] = -g;
    }
    return loss;
}

inline double seq_bce(const nn::Sequence& logits, double label, nn::Sequence* grad, double weight = 1.0)
{
    double loss = 0.0;
    const auto T = static_cast<double>(logits.size());
    if (grad)
        grad->resize(logits.size());
    for (std::size_t t = 0; t < logits.size(); ++t) {
        const nn::Matrix y = nn::Matrix::Constant(logits[t].rows(), logits[t].cols(), label);
        loss += nn::bce_loss(logits[t], y) / T;
        if (grad)
            (*grad)[t] = nn::bce_grad(logits[t], y) * (weight / T);
    }
    return loss;
}

/**
 * Moment matching: mean over (t, c) of |std_b(X^) - std_b(X)| + |mean_b(X^) - mean_b(X)|,
 * statistics taken across the batch. Gradient w.r.t. X^ only.
 */
inline double moment_loss(const nn::Sequence& fake, const nn::Sequence& real, nn::Sequence* grad, double weight = 1.0)
{
    const std::size_t T = fake.size();
    const Eigen::Index C = fake[0].cols();
    const auto Bf = static_cast<double>(fake[0].rows());
    const auto Br = static_cast<double>(real[0].rows());
    const double cells = static_cast<double>(T) * static_cast<double>(C);
    double loss = 0.0;
    if (grad)
        grad->assign(T, nn::Matrix::Zero(fake[0].rows(), C));
    for (std::size_t t = 0; t < T; ++t)
        for (Eigen::Index c = 0; c < C; ++c) {
            const double mf = fake[t].col(c).mean();
            const double mr = real[t].col(c).mean();
            const double vf = (fake[t].col(c).array() - mf).square().sum() / Bf;
            const double vr = (real[t].col(c).array() - mr).square().sum() / Br;
            const double sf = std::sqrt(vf + 1e-6), sr = std::sqrt(vr + 1e-6);
            loss += (std::abs(sf - sr) + std::abs(mf - mr)) / cells;
            if (grad) {
                const double gs = (sf > sr ? 1.0 : (sf < sr ? -1.0 : 0.0)) * weight / cells;
                const double gm = (mf > mr ? 1.0 : (mf < mr ? -1.0 : 0.0)) * weight / cells;
                for (Eigen::Index b = 0; b < fake[t].rows(); ++b)
                    (*grad)[t](b, c) = gs * (fake[t](b, c) - mf) / (Bf * sf) + gm / Bf;
            }
        }
    return loss;
}

/**
 * Per-channel marginal match: fake values pooled over (t, b) and sorted, each
 * compared with the real empirical quantile at the same plotting position
 * (i + 0.5) / n. Mean squared gap, averaged over channels. Gradient w.r.t.
 * fake only.
 */
inline double marginal_loss(const nn::Sequence& fake, const nn::Sequence& real, nn::Sequence* grad,
                            double weight = 1.0)
{
    const std::size_t T = fake.size();
    const Eigen::Index C = fake[0].cols(), Bf = fake[0].rows(), Br = real[0].rows();
    const std::size_t nf = T * static_cast<std::size_t>(Bf), nr = real.size() * static_cast<std::size_t>(Br);
    if (grad)
        grad->assign(T, nn::Matrix::Zero(Bf, C));
    double loss = 0.0;
    std::vector<std::pair<double, std::size_t>> f(nf);
    std::vector<double> r(nr);
    for (Eigen::Index c = 0; c < C; ++c) {
        for (std::size_t t = 0; t < T; ++t)
            for (Eigen::Index b = 0; b < Bf; ++b)
                f[t * static_cast<std::size_t>(Bf) + static_cast<std::size_t>(b)] = {fake[t](b, c),
                                                                                    t * static_cast<std::size_t>(Bf) +
                                                                                        static_cast<std::size_t>(b)};
        for (std::size_t t = 0; t < real.size(); ++t)
            for (Eigen::Index b = 0; b < Br; ++b)
                r[t * static_cast<std::size_t>(Br) + static_cast<std::size_t>(b)] = real[t](b, c);
        std::sort(f.begin(), f.end());
        std::sort(r.begin(), r.end());
        for (std::size_t i = 0; i < nf; ++i) {
            const double pos = (static_cast<double>(i) + 0.5) / static_cast<double>(nf) * static_cast<double>(nr) - 0.5;
            const double cl = std::clamp(pos, 0.0, static_cast<double>(nr - 1));
            const auto lo = static_cast<std::size_t>(cl);
            const std::size_t hi = std::min(lo + 1, nr - 1);
            const double q = r[lo] + (cl - static_cast<double>(lo)) * (r[hi] - r[lo]);
            const double d = f[i].first - q;
            loss += d * d / static_cast<double>(nf * static_cast<std::size_t>(C));
            if (grad) {
                const std::size_t k = f[i].second;
                (*grad)[k / static_cast<std::size_t>(Bf)](static_cast<Eigen::Index>(k % static_cast<std::size_t>(Bf)),
                                                          c) = 2.0 * d * weight /
                                                               static_cast<double>(nf * static_cast<std::size_t>(C));
            }
        }
    }
    return loss;
}

inline void add_into(nn::Sequence& a, const nn::Sequence& b)
{
    for (std::size_t t = 0; t < a.size(); ++t)
        a[t] += b[t];
}

inline void check_finite(double v, const char* what, int epoch)
{
    if (!std::isfinite(v))
        throw TrainingError(std::string("timegan: ") + what + " became non-finite in epoch " + std::to_string(epoch));
}

} // namespace detail

/// Generator loss on one batch; with @p backward, accumulates gradients (meaningful for generator and supervisor).
inline double generator_loss(TimeGanModel& m, const nn::Sequence& X, const nn::Sequence& Z, bool backward)
{
    const auto& h = m.hyper;
    nn::SequenceNetwork::Cache cg, cs_fake, cr, cd_fake, cd_e, cs_real;
    const auto Ehat = m.generator.forward(Z, &cg);
    const auto Hhat = m.supervisor.forward(Ehat, &cs_fake);
    const auto Xhat = m.recovery.forward(Hhat, &cr);
    const auto Yf = m.discriminator.forward(Hhat, &cd_fake);
    const auto Ye = m.discriminator.forward(Ehat, &cd_e);
    const auto H = m.embedder.forward(X);
    const auto Hs = m.supervisor.forward(H, &cs_real);

    nn::Sequence d_yf, d_ye, d_xhat, d_marg, d_hs;
    const double lu = detail::seq_bce(Yf, 1.0, &d_yf);
    const double lue = detail::seq_bce(Ye, 1.0, &d_ye, h.gamma);
    const double ls = detail::next_step_mse(Hs, H, &d_hs, nullptr, h.eta);
    const double lv = detail::moment_loss(Xhat, X, &d_xhat, h.moment_weight);
    const double lm = h.marginal_weight > 0.0 ? detail::marginal_loss(Xhat, X, &d_marg, h.marginal_weight) : 0.0;
    if (h.marginal_weight > 0.0)
        detail::add_into(d_xhat, d_marg);
    if (backward) {
        auto d_hhat = m.discriminator.backward(cd_fake, d_yf);
        detail::add_into(d_hhat, m.recovery.backward(cr, d_xhat));
        auto d_ehat = m.supervisor.backward(cs_fake, d_hhat);
        detail::add_into(d_ehat, m.discriminator.backward(cd_e, d_ye));
        m.generator.backward(cg, d_ehat);
        m.supervisor.backward(cs_real, d_hs);
    }
    return lu + h.gamma * lue + h.eta * ls + h.moment_weight * lv + h.marginal_weight * lm;
}

/// Reconstruction plus weighted supervised loss; gradients meaningful for embedder and recovery.
inline double embedder_loss(TimeGanModel& m, const nn::Sequence& X, bool backward)
{
    const auto& h = m.hyper;
    nn::SequenceNetwork::Cache ce, cr, cs;
    const auto H = m.embedder.forward(X, &ce);
    const auto Xt = m.recovery.forward(H, &cr);
    const auto Hs = m.supervisor.forward(H, &cs);
    nn::Sequence dx, d_hs, d_h_target;
    const double lr = detail::seq_mse(Xt, X, &dx, h.recon_weight);
    const double ls = detail::next_step_mse(Hs, H, &d_hs, &d_h_target, h.embed_supervised_weight);
    if (backward) {
        auto dh = m.recovery.backward(cr, dx);
        detail::add_into(dh, m.supervisor.backward(cs, d_hs));
        detail::add_into(dh, d_h_target);
        m.embedder.backward(ce, dh);
    }
    return h.recon_weight * lr + h.embed_supervised_weight * ls;
}

/// Discriminator cross-entropy on real, supervised-fake and raw-fake latents; gradients for the discriminator only.
inline double discriminator_loss(TimeGanModel& m, const nn::Sequence& X, const nn::Sequence& Z, bool backward,
                                 double* correct = nullptr, double* judged = nullptr)
{
    const auto& h = m.hyper;
    const auto H = m.embedder.forward(X);
    const auto Ehat = m.generator.forward(Z);
    const auto Hhat = m.supervisor.forward(Ehat);
    nn::SequenceNetwork::Cache cr, cf, ce;
    const auto Yr = m.discriminator.forward(H, &cr);
    const auto Yf = m.discriminator.forward(Hhat, &cf);
    const auto Ye = m.discriminator.forward(Ehat, &ce);
    nn::Sequence gr, gf, ge;
    const double ld = detail::seq_bce(Yr, 1.0, &gr) + detail::seq_bce(Yf, 0.0, &gf) + h.gamma * detail::seq_bce(Ye, 0.0, &ge, h.gamma);
    if (correct && judged)
        for (std::size_t t = 0; t < Yr.size(); ++t) {
            *correct += static_cast<double>((Yr[t].array() > 0.0).count() + (Yf[t].array() < 0.0).count());
            *judged += static_cast<double>(Yr[t].size() + Yf[t].size());
        }
    if (backward && ld > h.d_threshold) {
        m.discriminator.backward(cr, gr);
        m.discriminator.backward(cf, gf);
        m.discriminator.backward(ce, ge);
    }
    return ld;
}

/// Called after every joint epoch with the epoch number (1-based).
using TimeGanProgress = std::function<void(const std::string& phase, int epoch, double loss)>;

/**
 * Trains on windows in transformed space (each seq_len x features).
 * Checkpoints are taken every hyper.checkpoint_every joint epochs.
 */
inline TimeGanResult timegan_train(const std::vector<nn::Matrix>& windows, const TimeGanHyper& hyper, Seed seed,
                                   std::size_t min_windows = 1000, const TimeGanProgress& progress = {})
{
    hyper.validate();
    if (windows.size() < min_windows)
        throw ConfigError("timegan: need at least " + std::to_string(min_windows) + " windows, got " +
                          std::to_string(windows.size()));
    const auto T = static_cast<int>(windows.front().rows());
    const auto F = static_cast<int>(windows.front().cols());
    require(T >= 2, "timegan: windows need at least 2 steps");
    for (const auto& w : windows)
        require(w.rows() == T && w.cols() == F, "timegan: windows differ in shape");

    TimeGanResult res;
    TimeGanModel& m = res.model;
    m = TimeGanModel(hyper, F, T, seed);
    auto& E = m.embedder;
    auto& R = m.recovery;
    auto& G = m.generator;
    auto& S = m.supervisor;
    auto& D = m.discriminator;

    auto concat = [](nn::ParamList a, const nn::ParamList& b) {
        a.insert(a.end(), b.begin(), b.end());
        return a;
    };
    const nn::ParamList pe = E.parameters("embedder"), pr = R.parameters("recovery"), pg = G.parameters("generator"),
                        ps = S.parameters("supervisor"), pd = D.parameters("discriminator");
    const nn::ParamList p_er = concat(pe, pr), p_gs = concat(pg, ps);
    const nn::ParamList all = concat(concat(p_er, p_gs), pd);

    auto adam = [&] {
        nn::AdamState a;
        a.lr = hyper.lr;
        return a;
    };
    nn::AdamState a_embed = adam(), a_sup = adam(), a_gen = adam(), a_emb_joint = adam(), a_disc = adam();

    Rng rng(derive_seed(seed, 1));
    std::uint64_t noise_counter = 0;
    const Seed noise_root = derive_seed(seed, 2);
    auto next_noise = [&](std::size_t B) {
        std::vector<Seed> seeds(B);
        for (auto& s : seeds)
            s = derive_seed(noise_root, noise_counter++);
        return detail::noise_batch(T, hyper.noise_dim, seeds);
    };

    std::vector<std::size_t> order(windows.size());
    std::iota(order.begin(), order.end(), 0);
    const auto B = static_cast<std::size_t>(hyper.batch);
    auto for_batches = [&](auto&& fn) {
        rng.shuffle(order.begin(), order.end());
        for (std::size_t start = 0; start < order.size(); start += B) {
            const std::size_t end = std::min(order.size(), start + B);
            fn(std::span<const std::size_t>(order.data() + start, end - start));
        }
    };

    // Reconstruction error of the current embedder/recovery over the whole corpus.
    auto corpus_recon = [&] {
        double sum = 0.0;
        for (std::size_t start = 0; start < windows.size(); start += 512) {
            std::vector<std::size_t> rows;
            for (std::size_t i = start; i < std::min(windows.size(), start + 512); ++i)
                rows.push_back(i);
            const auto X = detail::batch_of(windows, rows);
            sum += detail::seq_mse(R.forward(E.forward(X)), X, nullptr) * static_cast<double>(rows.size());
        }
        return sum / static_cast<double>(windows.size());
    };
    res.log.initial_recon_mse = corpus_recon();

    // Phase 1: embedder + recovery.
    for (int ep = 1; ep <= hyper.embedding_epochs; ++ep) {
        double sum = 0.0;
        std::size_t n = 0;
        for_batches([&](std::span<const std::size_t> rows) {
            nn::zero_grads(p_er);
            const auto X = detail::batch_of(windows, rows);
            nn::SequenceNetwork::Cache ce, cr;
            const auto H = E.forward(X, &ce);
            const auto Xt = R.forward(H, &cr);
            nn::Sequence dx;
            sum += detail::seq_mse(Xt, X, &dx);
            ++n;
            E.backward(ce, R.backward(cr, dx));
            nn::adam_update(p_er, a_embed);
        });
        res.log.recon_mse.push_back(sum / static_cast<double>(n));
        detail::check_finite(res.log.recon_mse.back(), "reconstruction loss", ep);
        if (progress)
            progress("embedding", ep, res.log.recon_mse.back());
    }

    // Phase 2: supervisor on real latents.
    for (int ep = 1; ep <= hyper.supervised_epochs; ++ep) {
        double sum = 0.0;
        std::size_t n = 0;
        for_batches([&](std::span<const std::size_t> rows) {
            nn::zero_grads(ps);
            const auto H = E.forward(detail::batch_of(windows, rows));
            nn::SequenceNetwork::Cache cs;
            const auto Hs = S.forward(H, &cs);
            nn::Sequence ds;
            sum += detail::next_step_mse(Hs, H, &ds, nullptr);
            ++n;
            S.backward(cs, ds);
            nn::adam_update(ps, a_sup);
        });
        res.log.supervised_mse.push_back(sum / static_cast<double>(n));
        detail::check_finite(res.log.supervised_mse.back(), "supervised loss", ep);
        if (progress)
            progress("supervised", ep, res.log.supervised_mse.back());
    }

    // Phase 3: joint training.
    int high_acc_run = 0;
    bool collapse_warned = false;
    for (int ep = 1; ep <= hyper.joint_epochs; ++ep) {
        double gsum = 0.0, esum = 0.0, dsum = 0.0;
        double correct = 0.0, judged = 0.0;
        std::size_t n = 0;
        for_batches([&](std::span<const std::size_t> rows) {
            const auto X = detail::batch_of(windows, rows);
            const std::size_t b = rows.size();

            nn::zero_grads(all);
            gsum += generator_loss(m, X, next_noise(b), true);
            nn::adam_update(p_gs, a_gen);

            nn::zero_grads(all);
            esum += embedder_loss(m, X, true);
            nn::adam_update(p_er, a_emb_joint);

            nn::zero_grads(all);
            const double ld = discriminator_loss(m, X, next_noise(b), true, &correct, &judged);
            dsum += ld;
            if (ld > hyper.d_threshold)
                nn::adam_update(pd, a_disc);
            ++n;
        });
        const auto nb = static_cast<double>(n);
        res.log.g_loss.push_back(gsum / nb);
        res.log.e_loss.push_back(esum / nb);
        res.log.d_loss.push_back(dsum / nb);
        res.log.d_accuracy.push_back(correct / judged);
        detail::check_finite(res.log.g_loss.back(), "generator loss", ep);
        detail::check_finite(res.log.e_loss.back(), "embedder loss", ep);
        detail::check_finite(res.log.d_loss.back(), "discriminator loss", ep);
        high_acc_run = res.log.d_accuracy.back() > 0.99 ? high_acc_run + 1 : 0;
        if (high_acc_run >= hyper.collapse_epochs && !collapse_warned) {
            res.log.warnings.push_back("discriminator accuracy above 0.99 for " + std::to_string(hyper.collapse_epochs) +
                                       " consecutive epochs (ending at joint epoch " + std::to_string(ep) + ")");
            collapse_warned = true;
        }
        m.epoch = ep;
        if (ep % hyper.checkpoint_every == 0) {
            m.recon_mse = corpus_recon();
            res.checkpoints.push_back({ep, m});
        }
        if (progress)
            progress("joint", ep, res.log.g_loss.back());
    }
    m.recon_mse = corpus_recon();
    return res;
}

/**
 * n windows: uniform noise -> generator -> supervisor -> recovery. Window i
 * draws its noise from derive_seed(seed, i), so the result does not depend
 * on batch size beyond rounding. Never touches training data.
 */
inline std::vector<nn::Matrix> timegan_generate(const TimeGanModel& model, std::size_t n, Seed seed,
                                                std::size_t batch = 512)
{
    std::vector<nn::Matrix> out;
    out.reserve(n);
    for (std::size_t start = 0; start < n; start += batch) {
        const std::size_t b = std::min(n, start + batch) - start;
        std::vector<Seed> seeds(b);
        for (std::size_t k = 0; k < b; ++k)
            seeds[k] = derive_seed(seed, start + k);
        const auto Z = detail::noise_batch(model.seq_len, model.hyper.noise_dim, seeds);
        const auto X = model.recovery.forward(model.supervisor.forward(model.generator.forward(Z)));
        for (std::size_t k = 0; k < b; ++k) {
            nn::Matrix w(model.seq_len, model.features);
            for (int t = 0; t < model.seq_len; ++t)
                w.row(t) = X[static_cast<std::size_t>(t)].row(static_cast<Eigen::Index>(k));
            out.push_back(std::move(w));
        }
    }
    return out;
}

} // namespace rdwctx::rotation
