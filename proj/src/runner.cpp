#include "glwalk/runner.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>

#include <json.hpp>

#include "glwalk/errors.hpp"
#include "glwalk/version.hpp"

namespace glwalk {

std::uint64_t fnv1a64(const void* data, std::size_t len) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = UINT64_C(0xCBF29CE484222325);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= UINT64_C(0x100000001B3);
    }
    return h;
}

std::uint64_t fnv1a64_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("checksum: cannot open " + path.string());
    std::uint64_t h = UINT64_C(0xCBF29CE484222325);
    char buf[65536];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= UINT64_C(0x100000001B3);
        }
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string iso_now() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void RunManifest::add_file(const std::filesystem::path& path) {
    files.emplace_back(path.filename().string(), hex64(fnv1a64_file(path)));
}

void RunManifest::write(const std::filesystem::path& path) const {
    nlohmann::json j;
    j["config_hash"] = config_hash;
    j["code_version"] = code_version.empty() ? kVersion : code_version;
    j["start_time"] = start_time;
    j["end_time"] = end_time;
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [name, sum] : files) arr.push_back({{"file", name}, {"checksum", sum}});
    j["outputs"] = arr;

    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("manifest: cannot open " + tmp.string());
        out << j.dump(2) << "\n";
    }
    std::filesystem::rename(tmp, path);
}

} // namespace glwalk
