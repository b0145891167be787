#pragma once

namespace harq_ee {

inline constexpr const char* kVersion = "0.1.0";

} // namespace harq_ee
