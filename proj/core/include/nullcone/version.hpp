#pragma once

namespace nullcone {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace nullcone
