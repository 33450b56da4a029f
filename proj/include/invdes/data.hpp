#pragma once

// Versioned data files compiled into the library (see data/).

#include <string_view>

#include "json.hpp"

namespace invdes::data {

/// Raw contents of a bundled file such as "grn_v1.json". Throws
/// std::out_of_range for unknown names.
std::string_view bundled_text(std::string_view name);

/// Parsed once and cached.
const nlohmann::json& bundled_json(std::string_view name);

}  // namespace invdes::data
