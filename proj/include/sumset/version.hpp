#pragma once

namespace sumset {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace sumset
