#pragma once

namespace ecx {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ecx
