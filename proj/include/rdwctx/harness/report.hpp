#pragma once
/**
 * @file report.hpp
 * @brief Machine-readable run reports and output-directory bookkeeping.
 *
 * report.json is a pure function of (command, config, seed, inputs). The
 * wall-clock time goes to timing.json next to it so the report itself stays
 * byte-reproducible.
 */

#include "rdwctx/core/errors.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace rdwctx::harness {

namespace fs = std::filesystem;

inline std::uint64_t fnv1a64(const std::string& s)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Hash of the resolved config; object keys are sorted by the JSON library, so equal trees hash equal.
inline std::string config_hash(const nlohmann::json& cfg)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(cfg.dump())));
    return buf;
}

struct RunReport {
    std::string command;
    std::string config_hash;
    std::uint64_t seed{0};
    nlohmann::json metrics = nlohmann::json::object();
    std::vector<std::string> artifacts; ///< relative to the output directory
    std::vector<std::string> warnings;

    [[nodiscard]] nlohmann::json to_json() const
    {
        return {{"format", "rdwctx.run_report"},
                {"version", 1},
                {"command", command},
                {"config_hash", config_hash},
                {"seed", seed},
                {"metrics", metrics},
                {"artifacts", artifacts},
                {"warnings", warnings},
                {"wall_clock", "timing.json"}};
    }
};

/**
 * Tracks every file a command creates under its output directory so a
 * failed run can remove them again.
 */
class OutputDir {
public:
    explicit OutputDir(fs::path root) : root_(std::move(root))
    {
        if (!fs::exists(root_)) {
            fs::create_directories(root_);
            created_root_ = true;
        } else if (!fs::is_directory(root_)) {
            throw ConfigError("output path '" + root_.string() + "' exists and is not a directory");
        }
    }

    [[nodiscard]] const fs::path& root() const { return root_; }

    /// Registers and returns root/rel, creating parent directories.
    fs::path file(const std::string& rel)
    {
        const fs::path p = root_ / rel;
        for (fs::path d = p.parent_path(); d != root_ && !fs::exists(d); d = d.parent_path())
            dirs_.push_back(d);
        fs::create_directories(p.parent_path());
        files_.push_back(rel);
        return p;
    }

    [[nodiscard]] const std::vector<std::string>& files() const { return files_; }

    /// Best effort; never throws.
    void remove_all() noexcept
    {
        std::error_code ec;
        for (const auto& f : files_)
            fs::remove(root_ / f, ec);
        for (auto it = dirs_.rbegin(); it != dirs_.rend(); ++it)
            fs::remove(*it, ec); // only succeeds if empty
        if (created_root_)
            fs::remove(root_, ec);
        files_.clear();
    }

private:
    fs::path root_;
    bool created_root_{false};
    std::vector<std::string> files_;
    std::vector<fs::path> dirs_;
};

inline void write_json_file(const fs::path& p, const nlohmann::json& j)
{
    std::ofstream os(p);
    if (!os)
        throw std::runtime_error("cannot write '" + p.string() + "'");
    os << j.dump(2) << '\n';
}

inline nlohmann::json read_json_file(const fs::path& p)
{
    std::ifstream in(p);
    if (!in)
        throw ConfigError("cannot open '" + p.string() + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("'" + p.string() + "' is not valid JSON: " + e.what());
    }
}

} // namespace rdwctx::harness
