#pragma once

namespace expfunc {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace expfunc
