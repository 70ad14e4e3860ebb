#pragma once

#include "rdwctx/nn/tensor.hpp"

#include <cmath>
#include <vector>

namespace rdwctx::nn {

struct AdamState {
    double lr{1e-3};
    double beta1{0.9};
    double beta2{0.999};
    double eps{1e-8};
    long step{0};
    std::vector<Matrix> m;
    std::vector<Matrix> v;
};

/// Bias-corrected Adam step on every parameter, using the accumulated grads.
inline void adam_update(const ParamList& params, AdamState& state)
{
    if (state.m.empty()) {
        for (const auto& p : params) {
            state.m.push_back(Matrix::Zero(p.value->rows(), p.value->cols()));
            state.v.push_back(Matrix::Zero(p.value->rows(), p.value->cols()));
        }
    }
    require(state.m.size() == params.size(), "adam_update: state does not match parameter list");
    ++state.step;
    const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    for (std::size_t k = 0; k < params.size(); ++k) {
        auto& w = *params[k].value;
        const auto& g = *params[k].grad;
        require(g.rows() == w.rows() && g.cols() == w.cols(), "adam_update: gradient shape mismatch");
        state.m[k] = state.beta1 * state.m[k] + (1.0 - state.beta1) * g;
        state.v[k] = state.beta2 * state.v[k] + (1.0 - state.beta2) * g.cwiseProduct(g);
        w.array() -= state.lr * (state.m[k].array() / c1) / ((state.v[k].array() / c2).sqrt() + state.eps);
    }
}

} // namespace rdwctx::nn
