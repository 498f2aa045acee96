#include "kdv5/manifest.hpp"

#include "kdv5/errors.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace kdv5 {

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

std::string file_sha256(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return sha256_hex(ss.str());
}

void write_atomic(const std::string& path, const std::string& contents) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot write " + tmp);
        f << contents;
        if (!f.flush()) throw std::runtime_error("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) throw std::runtime_error("cannot rename " + tmp);
}

std::string RunManifest::to_json() const {
    nlohmann::json j;
    j["command"] = command;
    j["config_digest"] = config_digest;
    j["seed"] = seed;
    j["version"] = version;
    j["convention"] = convention;
    j["tolerances"] = tolerances;
    j["outputs"] = outputs;
    j["checks"] = checks;
    j["summary"] = summary;
    j["warnings"] = warnings;
    j["pass"] = pass;
    return j.dump(2) + "\n";
}

RunManifest RunManifest::from_json(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        RunManifest m;
        m.command = j.value("command", "");
        m.config_digest = j.value("config_digest", "");
        m.seed = j.value("seed", std::uint64_t{0});
        m.version = j.value("version", "");
        m.convention = j.value("convention", "");
        m.tolerances = j.value("tolerances", std::map<std::string, double>{});
        m.outputs = j.value("outputs", std::map<std::string, std::string>{});
        m.checks = j.value("checks", std::map<std::string, bool>{});
        m.summary = j.value("summary", std::map<std::string, double>{});
        m.warnings = j.value("warnings", std::vector<std::string>{});
        m.pass = j.value("pass", false);
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("manifest: ") + e.what());
    }
}

}  // namespace kdv5
