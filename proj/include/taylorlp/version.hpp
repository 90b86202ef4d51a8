#pragma once

namespace tlp {
inline constexpr const char* kVersion = "0.1.0";
}
