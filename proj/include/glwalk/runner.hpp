#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace glwalk {

// FNV-1a 64-bit; used for config hashes and output checksums in the manifest.
std::uint64_t fnv1a64(const void* data, std::size_t len);
std::uint64_t fnv1a64_file(const std::filesystem::path& path);
std::string hex64(std::uint64_t v);

struct RunManifest {
    std::string config_hash;
    std::string code_version;
    std::string start_time;
    std::string end_time;
    std::vector<std::pair<std::string, std::string>> files; // (name, checksum)

    void add_file(const std::filesystem::path& path);
    void write(const std::filesystem::path& path) const; // atomic (temp + rename)
};

std::string iso_now();

} // namespace glwalk
