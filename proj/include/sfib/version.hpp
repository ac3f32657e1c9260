#pragma once

namespace sfib {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace sfib
