#pragma once
/**
 * @file tensor.hpp
 * @brief Dense float64 storage shared by every layer.
 *
 * Layers keep their weights as row-major Eigen matrices. Batches are laid out
 * with one sample per row, and a sequence is a vector of T such batches.
 * Tensor is the flat, shape-tagged form used for serialization.
 */

#include "rdwctx/core/errors.hpp"
#include "rdwctx/core/random.hpp"

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace rdwctx::nn {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::Matrix<double, 1, Eigen::Dynamic>;
using Sequence = std::vector<Matrix>; ///< T entries of [batch x dim]

struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> data; ///< row-major

    [[nodiscard]] std::size_t size() const
    {
        std::size_t n = 1;
        for (auto d : shape)
            n *= d;
        return n;
    }

    static Tensor from_matrix(const Matrix& m)
    {
        Tensor t;
        t.shape = {static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())};
        t.data.assign(m.data(), m.data() + m.size());
        return t;
    }

    [[nodiscard]] Matrix to_matrix() const
    {
        require(shape.size() == 2 && data.size() == size(), "Tensor: expected a consistent 2-D tensor");
        Matrix m(static_cast<Eigen::Index>(shape[0]), static_cast<Eigen::Index>(shape[1]));
        std::copy(data.begin(), data.end(), m.data());
        return m;
    }
};

/// Mutable view of one trainable array and its gradient accumulator.
struct ParamRef {
    std::string name;
    Matrix* value{nullptr};
    Matrix* grad{nullptr};
};

using ParamList = std::vector<ParamRef>;

inline void zero_grads(const ParamList& params)
{
    for (const auto& p : params)
        p.grad->setZero();
}

inline std::size_t count_parameters(const ParamList& params)
{
    std::size_t n = 0;
    for (const auto& p : params)
        n += static_cast<std::size_t>(p.value->size());
    return n;
}

/// Uniform in [-bound, bound], filled row-major from @p rng.
inline Matrix uniform_matrix(Eigen::Index rows, Eigen::Index cols, double bound, Rng& rng)
{
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i)
        m.data()[i] = rng.uniform(-bound, bound);
    return m;
}

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline Matrix sigmoid(const Matrix& z)
{
    return z.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

inline Matrix tanh(const Matrix& z) { return z.array().tanh().matrix(); }

} // namespace rdwctx::nn
