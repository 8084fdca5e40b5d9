#pragma once

namespace orrw {

inline constexpr const char* version = "0.1.0";

}  // namespace orrw
