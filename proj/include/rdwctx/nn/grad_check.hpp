#pragma once
/**
 * @file grad_check.hpp
 * @brief Central finite-difference verification of analytic gradients.
 *
 * Relative error per element is |a - n| / max(|a| + |n|, floor); the floor
 * keeps elements whose true gradient is ~0 from dominating through rounding
 * noise.
 */

#include "rdwctx/nn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

namespace rdwctx::nn {

struct GradCheckOptions {
    double step{1e-6};
    double tolerance{1e-4};
    double floor{1e-6};
    std::size_t max_params{10000};
};

struct GradCheckReport {
    double max_rel_error{0.0};
    double max_abs_error{0.0};
    std::size_t checked{0};
    std::string worst_param;
    std::size_t worst_index{0};
    bool passed{false};
};

/**
 * @param loss      evaluates the loss at the current parameter values
 * @param gradients recomputes analytic gradients into every ParamRef::grad
 */
inline GradCheckReport grad_check(const ParamList& params, const std::function<double()>& loss,
                                  const std::function<void()>& gradients, const GradCheckOptions& opt = {})
{
    require(count_parameters(params) <= opt.max_params, "grad_check: too many parameters for finite differences");
    zero_grads(params);
    gradients();
    std::vector<Matrix> analytic;
    for (const auto& p : params)
        analytic.push_back(*p.grad);

    GradCheckReport rep;
    for (std::size_t k = 0; k < params.size(); ++k) {
        Matrix& w = *params[k].value;
        for (Eigen::Index i = 0; i < w.size(); ++i) {
            const double orig = w.data()[i];
            w.data()[i] = orig + opt.step;
            const double up = loss();
            w.data()[i] = orig - opt.step;
            const double down = loss();
            w.data()[i] = orig;
            const double numeric = (up - down) / (2.0 * opt.step);
            const double a = analytic[k].data()[i];
            const double abs_err = std::abs(a - numeric);
            const double rel = abs_err / std::max(std::abs(a) + std::abs(numeric), opt.floor);
            rep.max_abs_error = std::max(rep.max_abs_error, abs_err);
            if (rel > rep.max_rel_error || rep.checked == 0) {
                rep.max_rel_error = rel;
                rep.worst_param = params[k].name;
                rep.worst_index = static_cast<std::size_t>(i);
            }
            ++rep.checked;
        }
    }
    rep.passed = rep.max_rel_error <= opt.tolerance;
    return rep;
}

} // namespace rdwctx::nn
