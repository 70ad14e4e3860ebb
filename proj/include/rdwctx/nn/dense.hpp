#pragma once

#include "rdwctx/nn/tensor.hpp"

#include <string>

namespace rdwctx::nn {

enum class Activation { linear, sigmoid, tanh };

inline std::string to_string(Activation a)
{
    switch (a) {
    case Activation::sigmoid: return "sigmoid";
    case Activation::tanh: return "tanh";
    default: return "linear";
    }
}

inline Activation parse_activation(const std::string& s)
{
    if (s == "sigmoid")
        return Activation::sigmoid;
    if (s == "tanh")
        return Activation::tanh;
    if (s == "linear")
        return Activation::linear;
    throw ConfigError("unknown activation '" + s + "'");
}

/// y = act(x W^T + b), applied independently to every time step.
class Dense {
public:
    struct Cache {
        Sequence inputs;
        Sequence outputs;
    };

    Dense() = default;
    Dense(int in, int out, Activation act, Rng& rng) : act_(act)
    {
        const double bound = 1.0 / std::sqrt(static_cast<double>(in));
        weight_ = uniform_matrix(out, in, bound, rng);
        bias_ = uniform_matrix(1, out, bound, rng);
        grad_w_ = Matrix::Zero(out, in);
        grad_b_ = Matrix::Zero(1, out);
    }

    [[nodiscard]] int input_size() const { return static_cast<int>(weight_.cols()); }
    [[nodiscard]] int output_size() const { return static_cast<int>(weight_.rows()); }
    [[nodiscard]] Activation activation() const { return act_; }

    Matrix& weight() { return weight_; }
    Matrix& bias() { return bias_; }
    [[nodiscard]] const Matrix& weight() const { return weight_; }
    [[nodiscard]] const Matrix& bias() const { return bias_; }

    [[nodiscard]] Matrix forward_step(const Matrix& x) const
    {
        require(x.cols() == weight_.cols(), "Dense: input dimension mismatch");
        Matrix z = x * weight_.transpose();
        z.rowwise() += bias_.row(0);
        switch (act_) {
        case Activation::sigmoid: return sigmoid(z);
        case Activation::tanh: return tanh(z);
        default: return z;
        }
    }

    Sequence forward(const Sequence& xs, Cache* cache = nullptr) const
    {
        Sequence ys;
        ys.reserve(xs.size());
        for (const auto& x : xs)
            ys.push_back(forward_step(x));
        if (cache) {
            cache->inputs = xs;
            cache->outputs = ys;
        }
        return ys;
    }

    /// Empty entries in @p dys are treated as zero gradients.
    Sequence backward(const Cache& cache, const Sequence& dys)
    {
        Sequence dxs(cache.inputs.size());
        for (std::size_t t = 0; t < cache.inputs.size(); ++t) {
            const Matrix& x = cache.inputs[t];
            if (dys[t].size() == 0) {
                dxs[t] = Matrix::Zero(x.rows(), x.cols());
                continue;
            }
            const Matrix& y = cache.outputs[t];
            Matrix dz;
            switch (act_) {
            case Activation::sigmoid: dz = (dys[t].array() * y.array() * (1.0 - y.array())).matrix(); break;
            case Activation::tanh: dz = (dys[t].array() * (1.0 - y.array().square())).matrix(); break;
            default: dz = dys[t]; break;
            }
            grad_w_.noalias() += dz.transpose() * x;
            grad_b_ += dz.colwise().sum();
            dxs[t].noalias() = dz * weight_;
        }
        return dxs;
    }

    void append_params(ParamList& out, const std::string& prefix)
    {
        out.push_back({prefix + ".weight", &weight_, &grad_w_});
        out.push_back({prefix + ".bias", &bias_, &grad_b_});
    }

private:
    Activation act_{Activation::linear};
    Matrix weight_;
    Matrix bias_;
    Matrix grad_w_;
    Matrix grad_b_;
};

} // namespace rdwctx::nn
