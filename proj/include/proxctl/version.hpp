#pragma once

namespace proxctl {

inline constexpr const char* version = "0.1.0";

}  // namespace proxctl
