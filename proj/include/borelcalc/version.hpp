#pragma once

namespace borelcalc {

inline constexpr const char* kVersionString = "0.1.0";

}  // namespace borelcalc
