#pragma once

// Umbrella header. io.hpp is separate because it pulls in nlohmann/json.

#include <mjsr/core.hpp>
#include <mjsr/kstep.hpp>
#include <mjsr/lift.hpp>
#include <mjsr/linalg.hpp>
#include <mjsr/radius.hpp>
#include <mjsr/words.hpp>

namespace mjsr {
inline constexpr const char* version = "0.1.0";
}
