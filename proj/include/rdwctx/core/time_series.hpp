#pragma once

#include "rdwctx/core/errors.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace rdwctx {

/// Uniformly sampled multi-channel series. All channels share one length.
struct TimeSeries {
    double start_time{0.0};
    double rate{1.0}; ///< Hz
    std::vector<std::string> channels;
    std::vector<std::vector<double>> values; ///< values[channel][sample]

    [[nodiscard]] std::size_t length() const { return values.empty() ? 0 : values.front().size(); }
    [[nodiscard]] double time_at(std::size_t i) const { return start_time + static_cast<double>(i) / rate; }

    [[nodiscard]] std::size_t channel_index(const std::string& name) const
    {
        for (std::size_t i = 0; i < channels.size(); ++i)
            if (channels[i] == name)
                return i;
        throw ContractViolation("TimeSeries: no channel named '" + name + "'");
    }

    void validate() const
    {
        require(rate > 0.0, "TimeSeries: rate must be positive");
        require(channels.size() == values.size(), "TimeSeries: channel/value count mismatch");
        for (const auto& v : values)
            require(v.size() == length(), "TimeSeries: channels differ in length");
    }
};

} // namespace rdwctx
