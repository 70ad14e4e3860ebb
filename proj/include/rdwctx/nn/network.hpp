#pragma once
/**
 * @file network.hpp
 * @brief Stacked recurrent network with a per-step dense head.
 *
 * Layer l feeds layer l+1; the head maps the top hidden state of every step
 * to the output. All layers start from a zero state.
 */

#include "rdwctx/nn/dense.hpp"
#include "rdwctx/nn/gru.hpp"
#include "rdwctx/nn/lstm.hpp"

#include <string>
#include <vector>

namespace rdwctx::nn {

enum class CellKind { lstm, gru };

inline std::string to_string(CellKind k) { return k == CellKind::lstm ? "lstm" : "gru"; }

inline CellKind parse_cell_kind(const std::string& s)
{
    if (s == "lstm")
        return CellKind::lstm;
    if (s == "gru")
        return CellKind::gru;
    throw ConfigError("unknown cell kind '" + s + "'");
}

struct NetworkSpec {
    CellKind cell{CellKind::lstm};
    int input{1};
    std::vector<int> hidden{8};
    int output{1};
    Activation output_activation{Activation::linear};

    void validate() const
    {
        if (input < 1 || output < 1 || hidden.empty())
            throw ConfigError("network: input/output must be >= 1 and at least one hidden layer is required");
        for (int h : hidden)
            if (h < 1)
                throw ConfigError("network: hidden sizes must be >= 1");
    }
};

class SequenceNetwork {
public:
    struct Cache {
        std::vector<LstmLayer::Cache> lstm;
        std::vector<GruLayer::Cache> gru;
        Dense::Cache head;
    };

    SequenceNetwork() = default;

    SequenceNetwork(const NetworkSpec& spec, Seed seed) : spec_(spec)
    {
        spec.validate();
        Rng rng(seed);
        int in = spec.input;
        for (int h : spec.hidden) {
            if (spec.cell == CellKind::lstm)
                lstm_.emplace_back(in, h, rng);
            else
                gru_.emplace_back(in, h, rng);
            in = h;
        }
        head_ = Dense(in, spec.output, spec.output_activation, rng);
    }

    [[nodiscard]] const NetworkSpec& spec() const { return spec_; }
    [[nodiscard]] std::size_t num_layers() const { return spec_.hidden.size(); }
    std::vector<LstmLayer>& lstm_layers() { return lstm_; }
    std::vector<GruLayer>& gru_layers() { return gru_; }
    [[nodiscard]] const std::vector<LstmLayer>& lstm_layers() const { return lstm_; }
    [[nodiscard]] const std::vector<GruLayer>& gru_layers() const { return gru_; }
    Dense& head() { return head_; }
    [[nodiscard]] const Dense& head() const { return head_; }

    /// Top-layer hidden sequence, before the head.
    Sequence hidden_forward(const Sequence& xs, Cache* cache = nullptr) const
    {
        require(!xs.empty(), "SequenceNetwork: need at least one time step");
        Sequence cur = xs;
        if (cache) {
            cache->lstm.assign(lstm_.size(), {});
            cache->gru.assign(gru_.size(), {});
        }
        for (std::size_t l = 0; l < lstm_.size(); ++l)
            cur = lstm_[l].forward(cur, cache ? &cache->lstm[l] : nullptr);
        for (std::size_t l = 0; l < gru_.size(); ++l)
            cur = gru_[l].forward(cur, cache ? &cache->gru[l] : nullptr);
        return cur;
    }

    Sequence forward(const Sequence& xs, Cache* cache = nullptr) const
    {
        return head_.forward(hidden_forward(xs, cache), cache ? &cache->head : nullptr);
    }

    /// Accumulates parameter gradients; returns d(loss)/d(inputs).
    Sequence backward(const Cache& cache, const Sequence& dys)
    {
        Sequence d = head_.backward(cache.head, dys);
        for (std::size_t l = gru_.size(); l-- > 0;)
            d = gru_[l].backward(cache.gru[l], d);
        for (std::size_t l = lstm_.size(); l-- > 0;)
            d = lstm_[l].backward(cache.lstm[l], d);
        return d;
    }

    ParamList parameters(const std::string& prefix = "net")
    {
        ParamList out;
        for (std::size_t l = 0; l < lstm_.size(); ++l)
            lstm_[l].append_params(out, prefix + ".lstm" + std::to_string(l));
        for (std::size_t l = 0; l < gru_.size(); ++l)
            gru_[l].append_params(out, prefix + ".gru" + std::to_string(l));
        head_.append_params(out, prefix + ".head");
        return out;
    }

    std::size_t parameter_count() { return count_parameters(parameters()); }

private:
    NetworkSpec spec_;
    std::vector<LstmLayer> lstm_;
    std::vector<GruLayer> gru_;
    Dense head_;
};

/// Packs rows of per-sample [T x D] matrices into a time-major Sequence.
inline Sequence to_sequence(const std::vector<const Matrix*>& samples)
{
    require(!samples.empty(), "to_sequence: no samples");
    const Eigen::Index T = samples.front()->rows();
    const Eigen::Index D = samples.front()->cols();
    Sequence seq(static_cast<std::size_t>(T), Matrix(static_cast<Eigen::Index>(samples.size()), D));
    for (std::size_t b = 0; b < samples.size(); ++b) {
        require(samples[b]->rows() == T && samples[b]->cols() == D, "to_sequence: ragged samples");
        for (Eigen::Index t = 0; t < T; ++t)
            seq[static_cast<std::size_t>(t)].row(static_cast<Eigen::Index>(b)) = samples[b]->row(t);
    }
    return seq;
}

} // namespace rdwctx::nn
