#pragma once
/**
 * @file predictor.hpp
 * @brief LSTM predictor of the physical position H steps ahead.
 *
 * Raw windows are encoded before they reach the network:
 *  - physical rows become per-step displacements rotated into the frame of
 *    the most recent non-zero physical step;
 *  - virtual rows (virtual variant) become per-step virtual displacements
 *    rotated into the frame of the most recent non-zero virtual step before
 *    the newest one, so the newest row shows the upcoming virtual turn;
 *  - the target is the displacement p(t+H) - p(t) in the physical frame.
 * Encoded features and targets are standardised with statistics from the
 * training split only. Decoding undoes every step.
 */

#include "rdwctx/core/random.hpp"
#include "rdwctx/lateral/windows.hpp"
#include "rdwctx/nn/adam.hpp"
#include "rdwctx/nn/loss.hpp"
#include "rdwctx/nn/network.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rdwctx::lateral {

struct PredictorHyper {
    int lookback{20};
    int horizon{2};
    nn::CellKind cell{nn::CellKind::lstm};
    std::vector<int> hidden{64, 64};
    int batch{64};
    double lr{1e-3};
    int max_epochs{200};
    int patience{10};
    double val_fraction{0.2};
    std::size_t max_train_windows{0}; ///< 0 keeps all; otherwise evenly strided subsample
    std::size_t min_windows{500};
    bool keep_reset_windows{true};

    void validate() const
    {
        if (lookback < 2 || horizon < 1)
            throw ConfigError("predictor: lookback must be >= 2 and horizon >= 1");
        if (batch < 1 || !(lr > 0.0) || max_epochs < 1 || patience < 1)
            throw ConfigError("predictor: batch, lr, max_epochs and patience must be positive");
        if (!(val_fraction > 0.0 && val_fraction < 1.0))
            throw ConfigError("predictor: val_fraction must be in (0, 1)");
    }
};

/// Window in the network's input space, before standardisation.
struct EncodedWindow {
    nn::Matrix rows;   ///< [(L-1) x D]
    double frame_deg{0.0}; ///< heading of the physical reference frame
    Vec2 origin;       ///< last physical position
};

namespace detail {

inline constexpr double kStillEps = 1e-6; // meters; trace CSVs carry 6 decimals

inline Vec2 row_point(const nn::Matrix& m, Eigen::Index r, Eigen::Index c0) { return {m(r, c0), m(r, c0 + 1)}; }

/// Heading of the newest displacement with norm above kStillEps among rows 1..last.
inline std::optional<double> reference_heading(const nn::Matrix& f, Eigen::Index col, Eigen::Index last)
{
    for (Eigen::Index k = last; k >= 1; --k) {
        const Vec2 d = row_point(f, k, col) - row_point(f, k - 1, col);
        if (d.norm() > kStillEps)
            return heading_of(d);
    }
    return std::nullopt;
}

} // namespace detail

inline EncodedWindow encode_window(const FeatureWindow& w)
{
    const auto& f = w.features;
    const Eigen::Index L = f.rows();
    require(L >= 2, "encode_window: lookback must be >= 2");
    const int D = feature_dim(w.variant);
    require(f.cols() == D, "encode_window: feature width does not match variant");

    EncodedWindow e;
    e.origin = detail::row_point(f, L - 1, 0);
    e.frame_deg = detail::reference_heading(f, 0, L - 1).value_or(0.0);
    e.rows.resize(L - 1, D);
    for (Eigen::Index k = 1; k < L; ++k) {
        const Vec2 d = rotate(detail::row_point(f, k, 0) - detail::row_point(f, k - 1, 0), -e.frame_deg);
        e.rows(k - 1, 0) = d.x;
        e.rows(k - 1, 1) = d.y;
    }
    if (w.variant == Variant::virtual_context) {
        const double vframe = detail::reference_heading(f, 2, L - 2).value_or(e.frame_deg);
        for (Eigen::Index k = 1; k < L; ++k) {
            const Vec2 d = rotate(detail::row_point(f, k, 2) - detail::row_point(f, k - 1, 2), -vframe);
            e.rows(k - 1, 2) = d.x;
            e.rows(k - 1, 3) = d.y;
        }
    }
    return e;
}

/// Target displacement expressed in the window's physical frame.
inline Vec2 encode_target(const FeatureWindow& w, const EncodedWindow& e)
{
    return rotate(w.target - e.origin, -e.frame_deg);
}

inline Vec2 decode_prediction(const EncodedWindow& e, Vec2 local) { return e.origin + rotate(local, e.frame_deg); }

struct TrainingLog {
    std::vector<double> train_loss; ///< standardised MSE per epoch
    std::vector<double> val_se;     ///< mean squared error in m² per epoch
    int best_epoch{-1};
    double best_val_se{std::numeric_limits<double>::infinity()};
    std::size_t train_windows{0};
    std::size_t val_windows{0};
    bool early_stopped{false};
};

class PredictorModel {
public:
    Variant variant{Variant::baseline};
    int lookback{20};
    int horizon{2};
    double rate{20.0};
    nn::SequenceNetwork net;
    std::vector<double> feature_mean, feature_std; ///< per encoded feature
    std::array<double, 2> target_mean{0.0, 0.0}, target_std{1.0, 1.0};

    /// Standardised network input for one window.
    [[nodiscard]] nn::Matrix standardise(const EncodedWindow& e) const
    {
        nn::Matrix m = e.rows;
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            m.col(c) = (m.col(c).array() - feature_mean[static_cast<std::size_t>(c)]) /
                       feature_std[static_cast<std::size_t>(c)];
        return m;
    }

    void check(const FeatureWindow& w) const
    {
        require(w.variant == variant, "predict: window variant does not match model");
        require(w.features.rows() == lookback, "predict: window lookback does not match model");
    }

    [[nodiscard]] std::vector<Vec2> predict_all(std::span<const FeatureWindow> windows, std::size_t batch = 512) const
    {
        std::vector<Vec2> out;
        out.reserve(windows.size());
        for (std::size_t start = 0; start < windows.size(); start += batch) {
            const std::size_t end = std::min(windows.size(), start + batch);
            std::vector<EncodedWindow> enc;
            std::vector<nn::Matrix> inputs;
            for (std::size_t i = start; i < end; ++i) {
                check(windows[i]);
                enc.push_back(encode_window(windows[i]));
                inputs.push_back(standardise(enc.back()));
            }
            std::vector<const nn::Matrix*> ptrs;
            for (const auto& m : inputs)
                ptrs.push_back(&m);
            const nn::Matrix y = net.forward(nn::to_sequence(ptrs)).back();
            for (std::size_t i = 0; i < enc.size(); ++i) {
                const auto r = static_cast<Eigen::Index>(i);
                const Vec2 local{target_mean[0] + target_std[0] * y(r, 0), target_mean[1] + target_std[1] * y(r, 1)};
                out.push_back(decode_prediction(enc[i], local));
            }
        }
        return out;
    }

    [[nodiscard]] Vec2 predict(const FeatureWindow& w) const
    {
        return predict_all(std::span<const FeatureWindow>(&w, 1)).front();
    }
};

namespace detail {

struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> val;
};

/// Per user: the first part of the time-ordered windows trains, the tail validates.
/// The last L+H training windows are dropped so no window overlaps the validation part.
inline Split contiguous_split(const std::vector<FeatureWindow>& windows, const PredictorHyper& hp)
{
    std::map<int, std::vector<std::size_t>> by_user;
    for (std::size_t i = 0; i < windows.size(); ++i)
        if (hp.keep_reset_windows || !windows[i].in_reset)
            by_user[windows[i].user].push_back(i);
    Split s;
    const auto gap = static_cast<std::size_t>(hp.lookback + hp.horizon);
    for (auto& [user, idx] : by_user) {
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return windows[a].end_index < windows[b].end_index; });
        const auto n = idx.size();
        const auto n_val = static_cast<std::size_t>(std::ceil(static_cast<double>(n) * hp.val_fraction));
        const std::size_t val_start = n - n_val;
        const std::size_t train_end = val_start > 2 * gap ? val_start - gap : val_start;
        s.train.insert(s.train.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(train_end));
        s.val.insert(s.val.end(), idx.begin() + static_cast<std::ptrdiff_t>(val_start), idx.end());
    }
    if (hp.max_train_windows > 0 && s.train.size() > hp.max_train_windows) {
        std::vector<std::size_t> sub;
        const double stride = static_cast<double>(s.train.size()) / static_cast<double>(hp.max_train_windows);
        for (std::size_t k = 0; k < hp.max_train_windows; ++k)
            sub.push_back(s.train[static_cast<std::size_t>(std::floor(k * stride))]);
        s.train = std::move(sub);
    }
    return s;
}

struct Prepared {
    std::vector<nn::Matrix> inputs; ///< standardised
    nn::Matrix targets;             ///< [N x 2] standardised
};

inline Prepared prepare(const PredictorModel& m, const std::vector<EncodedWindow>& enc,
                        const std::vector<Vec2>& local_targets, const std::vector<std::size_t>& idx)
{
    Prepared p;
    p.targets.resize(static_cast<Eigen::Index>(idx.size()), 2);
    for (std::size_t k = 0; k < idx.size(); ++k) {
        p.inputs.push_back(m.standardise(enc[idx[k]]));
        const Vec2 t = local_targets[idx[k]];
        p.targets(static_cast<Eigen::Index>(k), 0) = (t.x - m.target_mean[0]) / m.target_std[0];
        p.targets(static_cast<Eigen::Index>(k), 1) = (t.y - m.target_mean[1]) / m.target_std[1];
    }
    return p;
}

inline nn::Sequence batch_inputs(const Prepared& p, std::span<const std::size_t> rows)
{
    std::vector<const nn::Matrix*> ptrs;
    ptrs.reserve(rows.size());
    for (auto r : rows)
        ptrs.push_back(&p.inputs[r]);
    return nn::to_sequence(ptrs);
}

/// Mean squared error in m² (the rotation back to world frame preserves norms).
inline double mean_se(const PredictorModel& m, const Prepared& p)
{
    if (p.inputs.empty())
        return std::numeric_limits<double>::quiet_NaN();
    double sum = 0.0;
    std::vector<std::size_t> rows;
    for (std::size_t start = 0; start < p.inputs.size(); start += 512) {
        rows.clear();
        for (std::size_t i = start; i < std::min(p.inputs.size(), start + 512); ++i)
            rows.push_back(i);
        const nn::Matrix y = m.net.forward(batch_inputs(p, rows)).back();
        for (std::size_t k = 0; k < rows.size(); ++k) {
            const auto r = static_cast<Eigen::Index>(k), g = static_cast<Eigen::Index>(rows[k]);
            const double dx = (y(r, 0) - p.targets(g, 0)) * m.target_std[0];
            const double dy = (y(r, 1) - p.targets(g, 1)) * m.target_std[1];
            sum += dx * dx + dy * dy;
        }
    }
    return sum / static_cast<double>(p.inputs.size());
}

inline double safe_std(double var) { return var > 1e-24 ? std::sqrt(var) : 1.0; }

} // namespace detail

/**
 * Adam-trained MSE regression with early stopping on validation SE. The
 * parameters of the best validation epoch are returned. Deterministic for a
 * given window list, hyper-parameter set and seed.
 */
inline PredictorModel train_predictor(const std::vector<FeatureWindow>& windows, const PredictorHyper& hp, Seed seed,
                                      TrainingLog* log = nullptr, double rate = 20.0)
{
    hp.validate();
    if (windows.size() < hp.min_windows)
        throw ConfigError("train_predictor: need at least " + std::to_string(hp.min_windows) + " windows, got " +
                          std::to_string(windows.size()));
    PredictorModel model;
    model.variant = windows.front().variant;
    model.lookback = hp.lookback;
    model.horizon = hp.horizon;
    model.rate = rate;
    for (const auto& w : windows) {
        require(w.variant == model.variant, "train_predictor: mixed variants");
        require(w.features.rows() == hp.lookback, "train_predictor: window lookback differs from hyper.lookback");
    }
    const int D = feature_dim(model.variant);

    std::vector<EncodedWindow> enc;
    std::vector<Vec2> local;
    enc.reserve(windows.size());
    for (const auto& w : windows) {
        enc.push_back(encode_window(w));
        local.push_back(encode_target(w, enc.back()));
    }
    const auto split = detail::contiguous_split(windows, hp);
    require(!split.train.empty() && !split.val.empty(), "train_predictor: split left an empty partition");

    // Standardisation from the training split only.
    std::vector<double> sum(D, 0.0), sq(D, 0.0);
    double count = 0.0;
    double tsum[2] = {0, 0}, tsq[2] = {0, 0};
    for (auto i : split.train) {
        for (Eigen::Index r = 0; r < enc[i].rows.rows(); ++r)
            for (int c = 0; c < D; ++c) {
                sum[c] += enc[i].rows(r, c);
                sq[c] += enc[i].rows(r, c) * enc[i].rows(r, c);
            }
        count += static_cast<double>(enc[i].rows.rows());
        tsum[0] += local[i].x;
        tsum[1] += local[i].y;
        tsq[0] += local[i].x * local[i].x;
        tsq[1] += local[i].y * local[i].y;
    }
    for (int c = 0; c < D; ++c) {
        const double mean = sum[c] / count;
        model.feature_mean.push_back(mean);
        model.feature_std.push_back(detail::safe_std(sq[c] / count - mean * mean));
    }
    const auto nt = static_cast<double>(split.train.size());
    for (int c = 0; c < 2; ++c) {
        model.target_mean[c] = tsum[c] / nt;
        model.target_std[c] = detail::safe_std(tsq[c] / nt - model.target_mean[c] * model.target_mean[c]);
    }

    nn::NetworkSpec spec{hp.cell, D, hp.hidden, 2, nn::Activation::linear};
    model.net = nn::SequenceNetwork(spec, derive_seed(seed, 1));
    const auto train = detail::prepare(model, enc, local, split.train);
    const auto val = detail::prepare(model, enc, local, split.val);

    TrainingLog local_log;
    TrainingLog& lg = log ? *log : local_log;
    lg = TrainingLog{};
    lg.train_windows = train.inputs.size();
    lg.val_windows = val.inputs.size();

    auto params = model.net.parameters();
    nn::AdamState adam;
    adam.lr = hp.lr;
    Rng rng(derive_seed(seed, 2));
    std::vector<std::size_t> order(train.inputs.size());
    std::iota(order.begin(), order.end(), 0);
    nn::SequenceNetwork best = model.net;
    int since_best = 0;

    for (int epoch = 0; epoch < hp.max_epochs; ++epoch) {
        rng.shuffle(order.begin(), order.end());
        double loss_sum = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(hp.batch)) {
            const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(hp.batch));
            const std::span<const std::size_t> rows(order.data() + start, end - start);
            nn::Matrix y(static_cast<Eigen::Index>(rows.size()), 2);
            for (std::size_t k = 0; k < rows.size(); ++k)
                y.row(static_cast<Eigen::Index>(k)) = train.targets.row(static_cast<Eigen::Index>(rows[k]));

            nn::zero_grads(params);
            nn::SequenceNetwork::Cache cache;
            const auto ys = model.net.forward(detail::batch_inputs(train, rows), &cache);
            const double loss = nn::mse_loss(ys.back(), y);
            if (!std::isfinite(loss))
                throw TrainingError("train_predictor: loss became non-finite at epoch " + std::to_string(epoch) +
                                    " batch " + std::to_string(batches));
            nn::Sequence dys(ys.size());
            dys.back() = nn::mse_grad(ys.back(), y);
            model.net.backward(cache, dys);
            nn::adam_update(params, adam);
            loss_sum += loss;
            ++batches;
        }
        lg.train_loss.push_back(loss_sum / static_cast<double>(batches));
        const double vse = detail::mean_se(model, val);
        lg.val_se.push_back(vse);
        if (!std::isfinite(vse))
            throw TrainingError("train_predictor: validation error became non-finite at epoch " + std::to_string(epoch));
        if (vse < lg.best_val_se) {
            lg.best_val_se = vse;
            lg.best_epoch = epoch;
            best = model.net;
            since_best = 0;
        } else if (++since_best >= hp.patience) {
            lg.early_stopped = true;
            break;
        }
    }
    model.net = std::move(best);
    return model;
}

} // namespace rdwctx::lateral
