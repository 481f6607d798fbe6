#pragma once

namespace reloop {

inline constexpr const char* kVersion = "0.1.0";

} // namespace reloop
