#pragma once

namespace bti {

inline constexpr const char* kToolVersion = "0.1.0";

}
