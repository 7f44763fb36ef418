#pragma once

namespace sorkin {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sorkin
