#pragma once

namespace dlcot {

inline constexpr const char* kPipelineVersion = "0.1.0";

}  // namespace dlcot
