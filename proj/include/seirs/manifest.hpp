// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <map>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "seirs/config.hpp"
#include "seirs/version.hpp"

namespace seirs {

inline uint64_t fnv1a64(const char* data, std::size_t size) {
    uint64_t hash = 0xcbf29ce484222325ull;
    for (std::size_t i = 0; i < size; ++i) {
        hash ^= static_cast<unsigned char>(data[i]);
        hash *= 0x100000001b3ull;
    }
    return hash;
}

inline std::string fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path + " for checksumming");
    std::string bytes((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes.data(), bytes.size())));
    return std::string("fnv1a64:") + buf;
}

/// Everything needed to reproduce a run bit-for-bit on the same platform:
/// the resolved configuration echo, seed, and per-output checksums.
struct RunManifest {
    std::string mode;
    uint64_t seed = 0;
    int threads = 0;
    double wall_clock_seconds = 0.0;
    nlohmann::json config_echo;
    std::map<std::string, std::string> output_checksums;

    nlohmann::json to_json() const {
        nlohmann::json doc;
        doc["artifact_version"] = kVersion;
        doc["mode"] = mode;
        doc["seed"] = seed;
        doc["threads"] = threads;
        doc["wall_clock_seconds"] = wall_clock_seconds;
        doc["config"] = config_echo;
        doc["outputs"] = output_checksums;
        return doc;
    }

    void write(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open " + path + " for writing");
        out << to_json().dump(2) << '\n';
    }
};

}  // namespace seirs
