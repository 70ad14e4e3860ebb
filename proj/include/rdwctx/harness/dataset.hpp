#pragma once
/**
 * @file dataset.hpp
 * @brief File formats for windowed rotation data and angle-sample loading.
 *
 * Windowed CSV: header `window,t,yaw,pitch,roll`, one row per window step,
 * t restarting at 0 in each window, degrees with 6 decimals.
 */

#include "rdwctx/core/errors.hpp"
#include "rdwctx/nn/tensor.hpp"
#include "rdwctx/rotation/series.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace rdwctx::harness {

inline constexpr const char* kWindowCsvHeader = "window,t,yaw,pitch,roll";

inline void write_windows_csv(const std::string& path, const std::vector<nn::Matrix>& windows, double rate)
{
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot write '" + path + "'");
    os << kWindowCsvHeader << '\n';
    char buf[200];
    for (std::size_t k = 0; k < windows.size(); ++k)
        for (Eigen::Index r = 0; r < windows[k].rows(); ++r) {
            std::snprintf(buf, sizeof buf, "%zu,%.6f,%.6f,%.6f,%.6f\n", k, static_cast<double>(r) / rate,
                          windows[k](r, 0), windows[k](r, 1), windows[k](r, 2));
            os << buf;
        }
}

using ChannelSamples = std::array<std::vector<double>, rotation::kChannels>;

/// Angle samples from a rotation CSV (wrapped on read) or a windowed CSV.
inline ChannelSamples read_angle_samples(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open '" + path + "'");
    std::string header;
    std::getline(in, header);
    if (!header.empty() && header.back() == '\r')
        header.pop_back();
    ChannelSamples out;
    if (header == rotation::kRotationCsvHeader) {
        in.clear();
        in.seekg(0);
        const auto s = rotation::read_rotation_csv(in);
        for (int c = 0; c < rotation::kChannels; ++c)
            out[static_cast<std::size_t>(c)] = s.channel(c);
        return out;
    }
    if (header != kWindowCsvHeader)
        throw ConfigError("'" + path + "': expected header '" + rotation::kRotationCsvHeader + "' or '" +
                          kWindowCsvHeader + "'");
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r")
            continue;
        std::stringstream ss(line);
        std::string f;
        std::vector<double> v;
        while (std::getline(ss, f, ',')) {
            try {
                v.push_back(std::stod(f));
            } catch (const std::exception&) {
                throw ConfigError("'" + path + "' line " + std::to_string(lineno) + ": bad field '" + f + "'");
            }
        }
        if (v.size() != 5)
            throw ConfigError("'" + path + "' line " + std::to_string(lineno) + ": expected 5 fields");
        for (int c = 0; c < rotation::kChannels; ++c) {
            if (!std::isfinite(v[static_cast<std::size_t>(2 + c)]))
                throw ConfigError("'" + path + "' line " + std::to_string(lineno) + ": non-finite value");
            out[static_cast<std::size_t>(c)].push_back(v[static_cast<std::size_t>(2 + c)]);
        }
    }
    return out;
}

inline ChannelSamples read_angle_samples(const std::vector<std::string>& paths)
{
    ChannelSamples out;
    for (const auto& p : paths) {
        auto s = read_angle_samples(p);
        for (std::size_t c = 0; c < out.size(); ++c)
            out[c].insert(out[c].end(), s[c].begin(), s[c].end());
    }
    return out;
}

} // namespace rdwctx::harness
