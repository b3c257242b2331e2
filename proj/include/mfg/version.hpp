#pragma once

namespace mfg {
inline constexpr const char* kVersion = "0.1.0";
}
