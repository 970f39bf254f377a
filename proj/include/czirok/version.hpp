#pragma once

namespace czirok {

inline constexpr const char* kVersion = "0.1.0";

}
