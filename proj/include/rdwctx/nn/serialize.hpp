#pragma once
/**
 * @file serialize.hpp
 * @brief Versioned JSON form of a SequenceNetwork.
 *
 * Layout:
 * {
 *   "format": "rdwctx.network", "version": 1,
 *   "cell": "lstm" | "gru", "input": I, "hidden": [H1, ...], "output": O,
 *   "output_activation": "linear" | "sigmoid" | "tanh",
 *   "gate_order": ["forget","input","candidate","output"]   (lstm)
 *               | ["update","reset","candidate"]             (gru),
 *   "concat": "[x;h]",
 *   "params": [ { "name": ..., "shape": [rows, cols], "data": [row-major] }, ... ]
 * }
 * Parameters appear in the order of SequenceNetwork::parameters().
 */

#include "rdwctx/nn/network.hpp"

#include <json.hpp>

namespace rdwctx::nn {

inline constexpr int kNetworkFormatVersion = 1;

inline nlohmann::json to_json(SequenceNetwork& net)
{
    const auto& spec = net.spec();
    nlohmann::json j;
    j["format"] = "rdwctx.network";
    j["version"] = kNetworkFormatVersion;
    j["cell"] = to_string(spec.cell);
    j["input"] = spec.input;
    j["hidden"] = spec.hidden;
    j["output"] = spec.output;
    j["output_activation"] = to_string(spec.output_activation);
    j["gate_order"] = spec.cell == CellKind::lstm
                          ? nlohmann::json::array({"forget", "input", "candidate", "output"})
                          : nlohmann::json::array({"update", "reset", "candidate"});
    j["concat"] = "[x;h]";
    auto& arr = j["params"] = nlohmann::json::array();
    for (const auto& p : net.parameters()) {
        const Tensor t = Tensor::from_matrix(*p.value);
        arr.push_back({{"name", p.name}, {"shape", t.shape}, {"data", t.data}});
    }
    return j;
}

inline SequenceNetwork network_from_json(const nlohmann::json& j)
{
    if (j.value("format", "") != "rdwctx.network")
        throw ConfigError("network file: wrong format tag");
    if (j.value("version", 0) != kNetworkFormatVersion)
        throw ConfigError("network file: unsupported version");
    NetworkSpec spec;
    spec.cell = parse_cell_kind(j.at("cell").get<std::string>());
    spec.input = j.at("input").get<int>();
    spec.hidden = j.at("hidden").get<std::vector<int>>();
    spec.output = j.at("output").get<int>();
    spec.output_activation = parse_activation(j.at("output_activation").get<std::string>());
    SequenceNetwork net(spec, Seed{0});
    const auto params = net.parameters();
    const auto& arr = j.at("params");
    if (arr.size() != params.size())
        throw ConfigError("network file: parameter count mismatch");
    for (std::size_t k = 0; k < params.size(); ++k) {
        Tensor t;
        t.shape = arr[k].at("shape").get<std::vector<std::size_t>>();
        t.data = arr[k].at("data").get<std::vector<double>>();
        Matrix m = t.to_matrix();
        if (m.rows() != params[k].value->rows() || m.cols() != params[k].value->cols())
            throw ConfigError("network file: shape mismatch for " + params[k].name);
        *params[k].value = std::move(m);
    }
    return net;
}

} // namespace rdwctx::nn
