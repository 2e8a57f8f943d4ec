#pragma once

namespace stopval {

inline constexpr const char* kLibraryVersion = "0.1.0";

}  // namespace stopval
