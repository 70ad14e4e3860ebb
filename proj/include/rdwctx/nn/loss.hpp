#pragma once

#include "rdwctx/nn/tensor.hpp"

#include <algorithm>
#include <cmath>

namespace rdwctx::nn {

inline constexpr double kBceClamp = 1e-12;

/// Mean squared difference over all elements.
inline double mse_loss(const Matrix& pred, const Matrix& target)
{
    require(pred.rows() == target.rows() && pred.cols() == target.cols(), "mse_loss: shape mismatch");
    require(pred.size() > 0, "mse_loss: empty input");
    return (pred - target).squaredNorm() / static_cast<double>(pred.size());
}

inline Matrix mse_grad(const Matrix& pred, const Matrix& target)
{
    require(pred.rows() == target.rows() && pred.cols() == target.cols(), "mse_grad: shape mismatch");
    return (pred - target) * (2.0 / static_cast<double>(pred.size()));
}

/// Mean binary cross-entropy of σ(logits) against labels in [0, 1]; probabilities are clamped at 1e-12.
inline double bce_loss(const Matrix& logits, const Matrix& labels)
{
    require(logits.rows() == labels.rows() && logits.cols() == labels.cols(), "bce_loss: shape mismatch");
    require(logits.size() > 0, "bce_loss: empty input");
    double sum = 0.0;
    for (Eigen::Index i = 0; i < logits.size(); ++i) {
        const double l = logits.data()[i];
        const double y = labels.data()[i];
        const double p = std::max(sigmoid(l), kBceClamp);
        const double q = std::max(sigmoid(-l), kBceClamp);
        sum -= y * std::log(p) + (1.0 - y) * std::log(q);
    }
    return sum / static_cast<double>(logits.size());
}

inline Matrix bce_grad(const Matrix& logits, const Matrix& labels)
{
    require(logits.rows() == labels.rows() && logits.cols() == labels.cols(), "bce_grad: shape mismatch");
    const double inv_n = 1.0 / static_cast<double>(logits.size());
    Matrix g(logits.rows(), logits.cols());
    for (Eigen::Index i = 0; i < logits.size(); ++i) {
        const double l = logits.data()[i];
        const double y = labels.data()[i];
        const double p = sigmoid(l);
        const double q = sigmoid(-l);
        // d/dl of -y ln p = -y q ; of -(1-y) ln q = (1-y) p ; zero where clamped
        const double gp = p > kBceClamp ? -y * q : 0.0;
        const double gq = q > kBceClamp ? (1.0 - y) * p : 0.0;
        g.data()[i] = (gp + gq) * inv_n;
    }
    return g;
}

} // namespace rdwctx::nn
