#pragma once

#include <json.hpp>

#include <string>
#include <string_view>

namespace carto {

/// Lowercase hex SHA-256 of `bytes`.
std::string sha256Hex(std::string_view bytes);

/// Hash of the compact dump of `value` without its top-level "hash" field.
std::string contentHash(const nlohmann::json& value);

}  // namespace carto
