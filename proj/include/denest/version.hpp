#pragma once

namespace denest {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace denest
