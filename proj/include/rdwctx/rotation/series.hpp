#pragma once
/**
 * @file series.hpp
 * @brief Head-rotation series and the rotation CSV format.
 */

#include "rdwctx/core/angles.hpp"
#include "rdwctx/core/errors.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace rdwctx::rotation {

inline constexpr int kChannels = 3; // yaw, pitch, roll
inline constexpr const char* kRotationCsvHeader = "t,yaw,pitch,roll";

struct RotationSeries {
    double rate{250.0};
    std::vector<double> yaw, pitch, roll; ///< degrees

    [[nodiscard]] std::size_t length() const { return yaw.size(); }

    [[nodiscard]] std::vector<double>& channel(int c) { return c == 0 ? yaw : (c == 1 ? pitch : roll); }
    [[nodiscard]] const std::vector<double>& channel(int c) const { return c == 0 ? yaw : (c == 1 ? pitch : roll); }

    void validate() const
    {
        if (!(rate > 0.0))
            throw DomainError("rotation series: rate must be positive");
        if (pitch.size() != yaw.size() || roll.size() != yaw.size())
            throw DomainError("rotation series: channel lengths differ");
    }
};

/// Samples [begin, end) of every channel.
inline RotationSeries slice(const RotationSeries& s, std::size_t begin, std::size_t end)
{
    require(begin <= end && end <= s.length(), "rotation series: slice out of range");
    RotationSeries out;
    out.rate = s.rate;
    for (int c = 0; c < kChannels; ++c)
        out.channel(c).assign(s.channel(c).begin() + static_cast<long>(begin), s.channel(c).begin() + static_cast<long>(end));
    return out;
}

/// Wrap every channel to [-180, 180).
inline RotationSeries wrapped(RotationSeries s)
{
    for (int c = 0; c < kChannels; ++c)
        for (double& v : s.channel(c))
            v = wrap_angle(v);
    return s;
}

inline void write_rotation_csv(std::ostream& os, const RotationSeries& s)
{
    s.validate();
    os << kRotationCsvHeader << '\n';
    char buf[160];
    for (std::size_t i = 0; i < s.length(); ++i) {
        std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f,%.6f\n", static_cast<double>(i) / s.rate, s.yaw[i], s.pitch[i],
                      s.roll[i]);
        os << buf;
    }
}

inline void write_rotation_csv(const std::string& path, const RotationSeries& s)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw std::runtime_error("cannot write " + path);
    write_rotation_csv(os, s);
    if (!os)
        throw std::runtime_error("write failed: " + path);
}

/// Reads a rotation CSV; angles are wrapped on ingest and the rate is taken from the time column.
inline RotationSeries read_rotation_csv(std::istream& is, double fallback_rate = 250.0)
{
    std::string line;
    if (!std::getline(is, line))
        throw ConfigError("rotation csv: empty input");
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    if (line != kRotationCsvHeader)
        throw ConfigError("rotation csv: expected header '" + std::string(kRotationCsvHeader) + "'");
    RotationSeries s;
    std::vector<double> t;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line == "\r")
            continue;
        std::array<double, 4> v{};
        std::istringstream ls(line);
        std::string cell;
        for (int k = 0; k < 4; ++k) {
            if (!std::getline(ls, cell, ','))
                throw ConfigError("rotation csv: line " + std::to_string(lineno) + " has fewer than 4 fields");
            try {
                v[static_cast<std::size_t>(k)] = std::stod(cell);
            } catch (const std::exception&) {
                throw ConfigError("rotation csv: bad number '" + cell + "' on line " + std::to_string(lineno));
            }
        }
        for (double x : v)
            if (!std::isfinite(x))
                throw ConfigError("rotation csv: non-finite value on line " + std::to_string(lineno));
        t.push_back(v[0]);
        s.yaw.push_back(wrap_angle(v[1]));
        s.pitch.push_back(wrap_angle(v[2]));
        s.roll.push_back(wrap_angle(v[3]));
    }
    if (t.size() >= 2) {
        const double dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
        if (!(dt > 0.0))
            throw ConfigError("rotation csv: time column is not increasing");
        s.rate = std::round(1.0 / dt * 1e6) / 1e6;
    } else {
        s.rate = fallback_rate;
    }
    return s;
}

inline RotationSeries read_rotation_csv(const std::string& path, double fallback_rate = 250.0)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw ConfigError("cannot open rotation csv " + path);
    return read_rotation_csv(is, fallback_rate);
}

} // namespace rdwctx::rotation
