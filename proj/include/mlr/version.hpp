#pragma once

namespace mlr {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace mlr
