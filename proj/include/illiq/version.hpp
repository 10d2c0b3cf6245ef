#pragma once

namespace illiq {

inline constexpr const char* kToolkitVersion = "0.1.0";

} // namespace illiq
