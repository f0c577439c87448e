#pragma once

#include <string_view>

namespace carleman {

inline constexpr std::string_view tool_version = "1.0.0";

}  // namespace carleman
