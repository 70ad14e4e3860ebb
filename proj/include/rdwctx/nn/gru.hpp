#pragma once
/**
 * @file gru.hpp
 * @brief GRU cell and batched GRU layer.
 *
 * Weight is [3H x (I+H)] with row blocks update, reset, candidate:
 *
 *   z  = σ(Wz [x;h] + bz)          r = σ(Wr [x;h] + br)
 *   n  = tanh(Wn [x; r ⊙ h] + bn)
 *   h' = z ⊙ h + (1 - z) ⊙ n
 *
 * A closed update gate (z -> 0) therefore makes h' follow the candidate.
 */

#include "rdwctx/nn/tensor.hpp"

#include <string>

namespace rdwctx::nn {

struct GruCellParams {
    Matrix weight; ///< [3H x (I+H)]
    Matrix bias;   ///< [1 x 3H]

    [[nodiscard]] int hidden_size() const { return static_cast<int>(weight.rows() / 3); }
    [[nodiscard]] int input_size() const { return static_cast<int>(weight.cols()) - hidden_size(); }

    static GruCellParams zeros(int input, int hidden)
    {
        return {Matrix::Zero(3 * hidden, input + hidden), Matrix::Zero(1, 3 * hidden)};
    }

    static GruCellParams random(int input, int hidden, Rng& rng)
    {
        const double bound = 1.0 / std::sqrt(static_cast<double>(input + hidden));
        GruCellParams p;
        p.weight = uniform_matrix(3 * hidden, input + hidden, bound, rng);
        p.bias = uniform_matrix(1, 3 * hidden, bound, rng);
        return p;
    }

    void validate() const
    {
        require(weight.rows() % 3 == 0 && weight.rows() > 0, "GruCellParams: weight rows must be 3*hidden");
        require(weight.cols() > weight.rows() / 3, "GruCellParams: weight cols must be input+hidden");
        require(bias.rows() == 1 && bias.cols() == weight.rows(), "GruCellParams: bias must be [1 x 3H]");
    }
};

namespace detail {

struct GruStepCache {
    Matrix zr; ///< [B x 2H] post-sigmoid update|reset
    Matrix rh; ///< r ⊙ h
    Matrix n;  ///< candidate
};

inline Matrix gru_step_impl(const GruCellParams& p, const Matrix& x, const Matrix& h, GruStepCache* cache)
{
    const Eigen::Index H = p.weight.rows() / 3;
    const Eigen::Index I = p.weight.cols() - H;
    Matrix a = x * p.weight.topRows(2 * H).leftCols(I).transpose();
    a.noalias() += h * p.weight.topRows(2 * H).rightCols(H).transpose();
    a.rowwise() += p.bias.leftCols(2 * H).row(0);
    Matrix zr = (1.0 / (1.0 + (-a.array()).exp())).matrix();
    Matrix rh = (zr.rightCols(H).array() * h.array()).matrix();
    Matrix an = x * p.weight.bottomRows(H).leftCols(I).transpose();
    an.noalias() += rh * p.weight.bottomRows(H).rightCols(H).transpose();
    an.rowwise() += p.bias.rightCols(H).row(0);
    Matrix n = an.array().tanh().matrix();
    Matrix h_new = (zr.leftCols(H).array() * h.array() + (1.0 - zr.leftCols(H).array()) * n.array()).matrix();
    if (cache) {
        cache->zr = std::move(zr);
        cache->rh = std::move(rh);
        cache->n = std::move(n);
    }
    return h_new;
}

} // namespace detail

inline Matrix gru_step(const GruCellParams& p, const Matrix& x, const Matrix& h)
{
    p.validate();
    require(x.cols() == p.input_size(), "gru_step: input dimension mismatch");
    require(h.cols() == p.hidden_size() && h.rows() == x.rows(), "gru_step: state shape mismatch");
    return detail::gru_step_impl(p, x, h, nullptr);
}

class GruLayer {
public:
    struct Cache {
        Sequence inputs;
        Sequence h_prev;
        std::vector<detail::GruStepCache> steps;
    };

    GruLayer() = default;
    GruLayer(int input, int hidden, Rng& rng) : params_(GruCellParams::random(input, hidden, rng))
    {
        grads_ = GruCellParams::zeros(input, hidden);
    }
    explicit GruLayer(GruCellParams params) : params_(std::move(params))
    {
        params_.validate();
        grads_ = GruCellParams::zeros(params_.input_size(), params_.hidden_size());
    }

    [[nodiscard]] int input_size() const { return params_.input_size(); }
    [[nodiscard]] int hidden_size() const { return params_.hidden_size(); }
    GruCellParams& params() { return params_; }
    [[nodiscard]] const GruCellParams& params() const { return params_; }
    [[nodiscard]] const GruCellParams& grads() const { return grads_; }

    Sequence forward(const Sequence& xs, Cache* cache = nullptr) const
    {
        require(!xs.empty(), "GruLayer: empty sequence");
        const Eigen::Index B = xs.front().rows();
        Matrix h = Matrix::Zero(B, hidden_size());
        Sequence hs;
        hs.reserve(xs.size());
        if (cache) {
            cache->inputs = xs;
            cache->h_prev.clear();
            cache->steps.clear();
        }
        for (const Matrix& x : xs) {
            require(x.cols() == input_size() && x.rows() == B, "GruLayer: input shape mismatch");
            detail::GruStepCache sc;
            Matrix h_new = detail::gru_step_impl(params_, x, h, cache ? &sc : nullptr);
            if (cache) {
                cache->h_prev.push_back(h);
                cache->steps.push_back(std::move(sc));
            }
            h = h_new;
            hs.push_back(std::move(h_new));
        }
        return hs;
    }

    Sequence backward(const Cache& cache, const Sequence& dhs)
    {
        const std::size_t T = cache.inputs.size();
        const Eigen::Index H = hidden_size();
        const Eigen::Index I = input_size();
        const Eigen::Index B = cache.inputs.front().rows();
        const auto Wzr_x = params_.weight.topRows(2 * H).leftCols(I);
        const auto Wzr_h = params_.weight.topRows(2 * H).rightCols(H);
        const auto Wn_x = params_.weight.bottomRows(H).leftCols(I);
        const auto Wn_h = params_.weight.bottomRows(H).rightCols(H);

        Matrix dh_next = Matrix::Zero(B, H);
        Matrix dzr(B, 2 * H);
        Sequence dxs(T);
        for (std::size_t k = T; k-- > 0;) {
            Matrix dh = dh_next;
            if (dhs[k].size() != 0)
                dh += dhs[k];
            const auto& sc = cache.steps[k];
            const Matrix& h = cache.h_prev[k];
            const auto z = sc.zr.leftCols(H).array();
            const auto r = sc.zr.rightCols(H).array();
            const auto n = sc.n.array();

            Matrix dan = (dh.array() * (1.0 - z) * (1.0 - n.square())).matrix();
            Matrix drh = dan * Wn_h;
            auto dzra = dzr.array();
            dzra.leftCols(H) = dh.array() * (h.array() - n) * z * (1.0 - z);
            dzra.rightCols(H) = drh.array() * h.array() * r * (1.0 - r);

            grads_.weight.topRows(2 * H).leftCols(I).noalias() += dzr.transpose() * cache.inputs[k];
            grads_.weight.topRows(2 * H).rightCols(H).noalias() += dzr.transpose() * h;
            grads_.weight.bottomRows(H).leftCols(I).noalias() += dan.transpose() * cache.inputs[k];
            grads_.weight.bottomRows(H).rightCols(H).noalias() += dan.transpose() * sc.rh;
            grads_.bias.leftCols(2 * H) += dzr.colwise().sum();
            grads_.bias.rightCols(H) += dan.colwise().sum();

            dxs[k].noalias() = dzr * Wzr_x;
            dxs[k].noalias() += dan * Wn_x;
            dh_next = (dh.array() * z + drh.array() * r).matrix();
            dh_next.noalias() += dzr * Wzr_h;
        }
        return dxs;
    }

    void append_params(ParamList& out, const std::string& prefix)
    {
        out.push_back({prefix + ".weight", &params_.weight, &grads_.weight});
        out.push_back({prefix + ".bias", &params_.bias, &grads_.bias});
    }

private:
    GruCellParams params_;
    GruCellParams grads_;
};

} // namespace rdwctx::nn
