#pragma once

namespace gridinfo {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace gridinfo
