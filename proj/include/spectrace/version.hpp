#pragma once

namespace spectrace {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace spectrace
