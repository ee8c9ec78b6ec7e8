#pragma once

namespace pondscat {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace pondscat
