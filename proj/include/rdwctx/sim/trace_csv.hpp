#pragma once
/**
 * @file trace_csv.hpp
 * @brief Session trace CSV.
 *
 * Header: t,user,phys_x,phys_y,virt_x,virt_y,phys_heading,virt_heading,reset
 * Rows are time-major (all users of sample 0, then sample 1, ...). Times,
 * positions and headings use 6 decimals; reset is 0 or 1.
 */

#include "rdwctx/core/errors.hpp"
#include "rdwctx/sim/session.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace rdwctx::sim {

inline constexpr const char* kTraceCsvHeader = "t,user,phys_x,phys_y,virt_x,virt_y,phys_heading,virt_heading,reset";

inline void write_trace_csv(std::ostream& os, const SessionTrace& trace)
{
    os << kTraceCsvHeader << '\n';
    char buf[256];
    for (std::size_t i = 0; i < trace.length(); ++i) {
        for (std::size_t u = 0; u < trace.users.size(); ++u) {
            const TraceSample& s = trace.users[u][i];
            std::snprintf(buf, sizeof buf, "%.6f,%zu,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%d\n", trace.time_at(i), u,
                          s.phys_pos.x, s.phys_pos.y, s.virt_pos.x, s.virt_pos.y, s.phys_heading, s.virt_heading,
                          s.in_reset ? 1 : 0);
            os << buf;
        }
    }
}

inline void write_trace_csv(const std::string& path, const SessionTrace& trace)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw std::runtime_error("cannot write " + path);
    write_trace_csv(os, trace);
}

/// Reads a trace written by write_trace_csv. Gains and config are not stored in
/// the CSV and come back defaulted; the rate is recovered from the time column.
inline SessionTrace read_trace_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line))
        throw ConfigError("trace csv: empty input");
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    if (line != kTraceCsvHeader)
        throw ConfigError("trace csv: unexpected header '" + line + "'");

    std::map<int, std::vector<TraceSample>> per_user;
    std::vector<double> times;
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        double v[9];
        std::istringstream ls(line);
        std::string cell;
        int k = 0;
        while (k < 9 && std::getline(ls, cell, ','))
            v[k++] = std::stod(cell);
        if (k != 9)
            throw ConfigError("trace csv: malformed row '" + line + "'");
        const int user = static_cast<int>(v[1]);
        TraceSample s;
        s.phys_pos = {v[2], v[3]};
        s.virt_pos = {v[4], v[5]};
        s.phys_heading = v[6];
        s.virt_heading = v[7];
        s.in_reset = v[8] != 0.0;
        per_user[user].push_back(s);
        if (user == 0)
            times.push_back(v[0]);
    }
    SessionTrace trace;
    trace.num_users = static_cast<int>(per_user.size());
    for (auto& [u, samples] : per_user) {
        if (u != static_cast<int>(trace.users.size()))
            throw ConfigError("trace csv: user ids must be 0..n-1");
        trace.users.push_back(std::move(samples));
    }
    for (const auto& v : trace.users)
        if (v.size() != trace.users.front().size())
            throw ConfigError("trace csv: users have different sample counts");
    if (times.size() >= 2)
        trace.rate = std::round(1.0 / (times[1] - times[0]) * 1e6) / 1e6;
    trace.config.rate = trace.rate;
    trace.config.env.num_users = trace.num_users;
    return trace;
}

inline SessionTrace read_trace_csv(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw ConfigError("cannot open trace " + path);
    return read_trace_csv(is);
}

} // namespace rdwctx::sim
