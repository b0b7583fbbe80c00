#pragma once

#include <string_view>

namespace quantest {

/// git-describe-style build identifier, e.g. "v0.1.0-g1a2b3c4".
std::string_view version_string() noexcept;

}  // namespace quantest
