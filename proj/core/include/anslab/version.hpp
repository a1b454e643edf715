#pragma once

namespace anslab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace anslab
