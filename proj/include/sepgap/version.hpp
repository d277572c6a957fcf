#pragma once

namespace sepgap {

inline constexpr const char* version = "0.1.0";

}  // namespace sepgap
