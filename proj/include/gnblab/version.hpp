#pragma once

#include <cstdint>
#include <string>

namespace gnblab {

inline constexpr const char* version = "0.1.0";

/// Header line carried by every output file.
inline std::string metadata_line(const std::string& command, const std::string& law,
                                 const std::string& params, std::uint64_t seed) {
  return "# gnblab-version=" + std::string(version) + " command=" + command + " law=" + law +
         " params=" + params + " seed=" + std::to_string(seed);
}

}  // namespace gnblab
