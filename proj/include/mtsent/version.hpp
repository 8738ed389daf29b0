#pragma once

namespace mtsent {

inline constexpr const char* kVersion = "mtsent 0.1.0";

}  // namespace mtsent
