#pragma once

namespace glwalk {

inline constexpr const char* kVersion = "glwalk 0.1.0";
inline constexpr const char* kCsvSchemaVersion = "glwalk-csv v1";

} // namespace glwalk
