#pragma once

#include <string>
#include <string_view>

namespace triage::meshsync {

std::string base64_encode(std::string_view bytes);

/// Strict decoder: standard alphabet, mandatory padding, no whitespace.
/// Throws std::invalid_argument on malformed input.
std::string base64_decode(std::string_view text);

}  // namespace triage::meshsync
