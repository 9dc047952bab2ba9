#pragma once

namespace cnma {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cnma
