#pragma once

namespace cosim {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cosim
