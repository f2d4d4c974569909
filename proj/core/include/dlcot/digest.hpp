#pragma once

#include <string>
#include <string_view>

namespace dlcot {

/// SHA-256 of `data`, rendered as 64 lowercase hex characters. Stable across
/// platforms, so it is safe to use for cache keys and artifact tamper checks
/// that must agree between machines.
std::string sha256_hex(std::string_view data);

}  // namespace dlcot
