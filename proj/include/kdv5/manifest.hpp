#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace kdv5 {

inline constexpr const char* kVersion = "0.1.0";

/// Lowercase hex SHA-256 of the bytes.
std::string sha256_hex(const std::string& bytes);
std::string file_sha256(const std::string& path);

/// Writes to path + ".tmp" and renames over path.
void write_atomic(const std::string& path, const std::string& contents);

/// Reproducibility record.  No timestamps or host data, so equal inputs give equal bytes.
struct RunManifest {
    std::string command;
    std::string config_digest;                  // sha256 of the canonical config JSON
    std::uint64_t seed = 0;
    std::string version = kVersion;
    std::string convention;                      // identity sign convention in force
    std::map<std::string, double> tolerances;
    std::map<std::string, std::string> outputs;  // file name -> sha256
    std::map<std::string, bool> checks;
    std::map<std::string, double> summary;
    std::vector<std::string> warnings;
    bool pass = false;

    std::string to_json() const;
    static RunManifest from_json(const std::string& text);
};

}  // namespace kdv5
