#pragma once

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lrcone/errors.hpp"

namespace lrcone {

inline constexpr const char* kVersion = "0.1.0";

using json = nlohmann::json;

// ---- numeric formatting ---------------------------------------------------

// 17 significant digits: enough for bit-exact double round trips.
inline std::string format17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

// ---- grid parsing ----------------------------------------------------------
//
// "start:stop:count"      inclusive linear grid
// "log:start:stop:count"  inclusive log-spaced grid (start, stop > 0)
// count == 1 yields {start}.

inline std::vector<double> parse_grid(const std::string& spec) {
    std::string body = spec;
    bool logspace = false;
    if (body.rfind("log:", 0) == 0) {
        logspace = true;
        body = body.substr(4);
    }
    std::vector<std::string> parts;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 3)
        throw ConfigError("grid spec '" + spec + "' must be [log:]start:stop:count");

    double start, stop;
    long count;
    try {
        size_t pos;
        start = std::stod(parts[0], &pos);
        if (pos != parts[0].size()) throw std::invalid_argument("");
        stop = std::stod(parts[1], &pos);
        if (pos != parts[1].size()) throw std::invalid_argument("");
        count = std::stol(parts[2], &pos);
        if (pos != parts[2].size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
        throw ConfigError("grid spec '" + spec + "' has non-numeric fields");
    }
    if (count < 1) throw ConfigError("grid spec '" + spec + "': count must be >= 1");
    if (logspace && (start <= 0.0 || stop <= 0.0))
        throw ConfigError("grid spec '" + spec + "': log grid needs positive endpoints");

    std::vector<double> out;
    out.reserve(static_cast<size_t>(count));
    if (count == 1) {
        out.push_back(start);
        return out;
    }
    if (logspace) {
        const double la = std::log(start), lb = std::log(stop);
        for (long i = 0; i < count; ++i)
            out.push_back(std::exp(la + (lb - la) * static_cast<double>(i) / static_cast<double>(count - 1)));
        out.front() = start;
        out.back() = stop;
    } else {
        for (long i = 0; i < count; ++i)
            out.push_back(start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1));
        out.back() = stop;
    }
    return out;
}

// Nested refinement: midpoint insertion, doubling density while keeping every
// original point (linear grids in value space, log grids in log space).
inline std::vector<double> refine_grid(const std::vector<double>& g, bool logspace) {
    if (g.size() < 2) return g;
    std::vector<double> out;
    out.reserve(g.size() * 2 - 1);
    for (size_t i = 0; i + 1 < g.size(); ++i) {
        out.push_back(g[i]);
        if (logspace)
            out.push_back(std::exp(0.5 * (std::log(g[i]) + std::log(g[i + 1]))));
        else
            out.push_back(0.5 * (g[i] + g[i + 1]));
    }
    out.push_back(g.back());
    return out;
}

// ---- hashing ----------------------------------------------------------------

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Run directories are named by this: canonical dump (sorted keys) -> FNV-1a.
inline std::string config_hash(const json& j) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(j.dump())));
    return buf;
}

// ---- config validation -------------------------------------------------------

// Unknown keys are a hard error: catches typos that would otherwise silently
// fall back to defaults.
inline void validate_keys(const json& obj, const std::set<std::string>& allowed,
                          const std::string& context) {
    if (!obj.is_object()) throw ConfigError(context + ": expected a JSON object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key()))
            throw ConfigError(context + ": unknown key '" + it.key() + "'");
    }
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open file: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError("invalid JSON in " + path + ": " + e.what());
    }
    return j;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write file: " + path);
    out << content;
}

// ---- CSV ---------------------------------------------------------------------

// Fixed schema for leakage/correlator/truncation sweeps.
inline constexpr const char* kSweepCsvHeader = "center,r,t,value,norm_kind,seed,alpha,ensemble";

struct SweepRow {
    int center;
    double r, t, value;
    std::string norm_kind;
    std::uint64_t seed;
    double alpha;
    std::string ensemble;
};

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = kSweepCsvHeader;
    out += '\n';
    for (const auto& w : rows) {
        out += std::to_string(w.center);
        out += ',';
        out += format17(w.r);
        out += ',';
        out += format17(w.t);
        out += ',';
        out += format17(w.value);
        out += ',';
        out += w.norm_kind;
        out += ',';
        out += std::to_string(w.seed);
        out += ',';
        out += format17(w.alpha);
        out += ',';
        out += w.ensemble;
        out += '\n';
    }
    return out;
}

} // namespace lrcone
