#pragma once
/**
 * @file lstm.hpp
 * @brief LSTM cell and a batched, back-propagated LSTM layer.
 *
 * Parameters are stored as one [4H x (I+H)] matrix whose row blocks are the
 * gates in the fixed order forget, input, candidate, output, multiplying the
 * concatenation [x; h]. Bias is [1 x 4H] in the same gate order.
 *
 *   f  = σ(Wf [x;h] + bf)        i = σ(Wi [x;h] + bi)
 *   c~ = tanh(Wc [x;h] + bc)     o = σ(Wo [x;h] + bo)
 *   c' = f ⊙ c + i ⊙ c~          h' = o ⊙ tanh(c')
 */

#include "rdwctx/nn/tensor.hpp"

#include <string>

namespace rdwctx::nn {

struct LstmCellParams {
    Matrix weight; ///< [4H x (I+H)]
    Matrix bias;   ///< [1 x 4H]

    [[nodiscard]] int hidden_size() const { return static_cast<int>(weight.rows() / 4); }
    [[nodiscard]] int input_size() const { return static_cast<int>(weight.cols()) - hidden_size(); }

    static LstmCellParams zeros(int input, int hidden)
    {
        return {Matrix::Zero(4 * hidden, input + hidden), Matrix::Zero(1, 4 * hidden)};
    }

    static LstmCellParams random(int input, int hidden, Rng& rng)
    {
        const double bound = 1.0 / std::sqrt(static_cast<double>(input + hidden));
        LstmCellParams p;
        p.weight = uniform_matrix(4 * hidden, input + hidden, bound, rng);
        p.bias = uniform_matrix(1, 4 * hidden, bound, rng);
        return p;
    }

    void validate() const
    {
        require(weight.rows() % 4 == 0 && weight.rows() > 0, "LstmCellParams: weight rows must be 4*hidden");
        require(weight.cols() > weight.rows() / 4, "LstmCellParams: weight cols must be input+hidden");
        require(bias.rows() == 1 && bias.cols() == weight.rows(), "LstmCellParams: bias must be [1 x 4H]");
    }
};

struct LstmState {
    Matrix h;
    Matrix c;
};

namespace detail {

struct LstmGates {
    Matrix act; ///< [B x 4H] post-activation gates f|i|c~|o
};

inline LstmGates lstm_gates(const LstmCellParams& p, const Matrix& x, const Matrix& h)
{
    const Eigen::Index H = p.weight.rows() / 4;
    const Eigen::Index I = p.weight.cols() - H;
    Matrix z = x * p.weight.leftCols(I).transpose();
    z.noalias() += h * p.weight.rightCols(H).transpose();
    z.rowwise() += p.bias.row(0);
    LstmGates g;
    g.act.resize(z.rows(), z.cols());
    auto zs = z.array();
    auto a = g.act.array();
    a.leftCols(2 * H) = 1.0 / (1.0 + (-zs.leftCols(2 * H)).exp());
    a.middleCols(2 * H, H) = zs.middleCols(2 * H, H).tanh();
    a.rightCols(H) = 1.0 / (1.0 + (-zs.rightCols(H)).exp());
    return g;
}

} // namespace detail

/// One LSTM step on a batch ([B x I] inputs, [B x H] states).
inline LstmState lstm_step(const LstmCellParams& p, const Matrix& x, const Matrix& h, const Matrix& c)
{
    p.validate();
    const Eigen::Index H = p.hidden_size();
    require(x.cols() == p.input_size(), "lstm_step: input dimension mismatch");
    require(h.cols() == H && c.cols() == H, "lstm_step: state dimension mismatch");
    require(h.rows() == x.rows() && c.rows() == x.rows(), "lstm_step: batch size mismatch");
    const auto g = detail::lstm_gates(p, x, h);
    LstmState s;
    s.c = (g.act.leftCols(H).array() * c.array() + g.act.middleCols(H, H).array() * g.act.middleCols(2 * H, H).array())
              .matrix();
    s.h = (g.act.rightCols(H).array() * s.c.array().tanh()).matrix();
    return s;
}

class LstmLayer {
public:
    struct Cache {
        Sequence inputs;
        Sequence h_prev;
        Sequence c_prev;
        Sequence gates;
        Sequence tanh_c;
    };

    LstmLayer() = default;
    LstmLayer(int input, int hidden, Rng& rng) : params_(LstmCellParams::random(input, hidden, rng))
    {
        grads_ = LstmCellParams::zeros(input, hidden);
    }
    explicit LstmLayer(LstmCellParams params) : params_(std::move(params))
    {
        params_.validate();
        grads_ = LstmCellParams::zeros(params_.input_size(), params_.hidden_size());
    }

    [[nodiscard]] int input_size() const { return params_.input_size(); }
    [[nodiscard]] int hidden_size() const { return params_.hidden_size(); }
    LstmCellParams& params() { return params_; }
    [[nodiscard]] const LstmCellParams& params() const { return params_; }
    [[nodiscard]] const LstmCellParams& grads() const { return grads_; }

    /// Runs the layer over @p xs from a zero state. Returns the hidden sequence.
    Sequence forward(const Sequence& xs, Cache* cache = nullptr) const
    {
        require(!xs.empty(), "LstmLayer: empty sequence");
        const Eigen::Index B = xs.front().rows();
        const Eigen::Index H = hidden_size();
        Matrix h = Matrix::Zero(B, H);
        Matrix c = Matrix::Zero(B, H);
        Sequence hs;
        hs.reserve(xs.size());
        if (cache) {
            cache->inputs = xs;
            cache->h_prev.clear();
            cache->c_prev.clear();
            cache->gates.clear();
            cache->tanh_c.clear();
        }
        for (const Matrix& x : xs) {
            require(x.cols() == input_size() && x.rows() == B, "LstmLayer: input shape mismatch");
            auto g = detail::lstm_gates(params_, x, h);
            Matrix c_new = (g.act.leftCols(H).array() * c.array() +
                            g.act.middleCols(H, H).array() * g.act.middleCols(2 * H, H).array())
                               .matrix();
            Matrix tc = c_new.array().tanh().matrix();
            Matrix h_new = (g.act.rightCols(H).array() * tc.array()).matrix();
            if (cache) {
                cache->h_prev.push_back(h);
                cache->c_prev.push_back(c);
                cache->gates.push_back(std::move(g.act));
                cache->tanh_c.push_back(tc);
            }
            h = h_new;
            c = std::move(c_new);
            hs.push_back(std::move(h_new));
        }
        return hs;
    }

    /// Back-propagation through time. Empty entries in @p dhs mean zero.
    Sequence backward(const Cache& cache, const Sequence& dhs)
    {
        const std::size_t T = cache.inputs.size();
        const Eigen::Index H = hidden_size();
        const Eigen::Index I = input_size();
        const Eigen::Index B = cache.inputs.front().rows();
        Matrix dh_next = Matrix::Zero(B, H);
        Matrix dc_next = Matrix::Zero(B, H);
        Matrix dz(B, 4 * H);
        Sequence dxs(T);
        for (std::size_t k = T; k-- > 0;) {
            Matrix dh = dh_next;
            if (dhs[k].size() != 0)
                dh += dhs[k];
            const auto g = cache.gates[k].array();
            const auto f = g.leftCols(H);
            const auto i = g.middleCols(H, H);
            const auto cc = g.middleCols(2 * H, H);
            const auto o = g.rightCols(H);
            const auto tc = cache.tanh_c[k].array();

            Matrix dc = (dc_next.array() + dh.array() * o * (1.0 - tc.square())).matrix();
            auto dza = dz.array();
            dza.leftCols(H) = dc.array() * cache.c_prev[k].array() * f * (1.0 - f);
            dza.middleCols(H, H) = dc.array() * cc * i * (1.0 - i);
            dza.middleCols(2 * H, H) = dc.array() * i * (1.0 - cc.square());
            dza.rightCols(H) = dh.array() * tc * o * (1.0 - o);

            grads_.weight.leftCols(I).noalias() += dz.transpose() * cache.inputs[k];
            grads_.weight.rightCols(H).noalias() += dz.transpose() * cache.h_prev[k];
            grads_.bias += dz.colwise().sum();

            dxs[k].noalias() = dz * params_.weight.leftCols(I);
            dh_next.noalias() = dz * params_.weight.rightCols(H);
            dc_next = (dc.array() * f).matrix();
        }
        return dxs;
    }

    void append_params(ParamList& out, const std::string& prefix)
    {
        out.push_back({prefix + ".weight", &params_.weight, &grads_.weight});
        out.push_back({prefix + ".bias", &params_.bias, &grads_.bias});
    }

private:
    LstmCellParams params_;
    LstmCellParams grads_;
};

} // namespace rdwctx::nn
