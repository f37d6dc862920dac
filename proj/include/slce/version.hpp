#pragma once

#define SLCE_VERSION_MAJOR 0
#define SLCE_VERSION_MINOR 1
#define SLCE_VERSION_PATCH 0

namespace slce {
inline constexpr const char* version = "0.1.0";
/// Bumped whenever a JSON/CSV layout written by the library changes.
inline constexpr int schema_version = 1;
} // namespace slce
