#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <string_view>

#include "contacttrees/attribute.hpp"

namespace contacttrees::detail {

using nlohmann::json;

/// Decodes a JSON attribute value against its declaration. Null yields
/// nullopt. Throws SchemaViolation naming `where` on a kind mismatch.
std::optional<AttributeValue> decode_attribute(const json& value, const AttributeDef* def,
                                               const std::string& where);

/// Decodes a CSV cell. Empty cells are absent.
std::optional<AttributeValue> decode_cell(std::string_view cell, const AttributeDef& def,
                                          const std::string& where);

json encode_attribute(const AttributeValue& value);
std::string cell_text(const AttributeValue& value);

json attributes_to_json(const AttributeMap& attributes);

/// Parses JSON text, converting parse failures to MalformedInput with the byte
/// position.
json parse_json_text(std::string_view bytes, std::string_view what);

/// Rounds to three decimals and normalizes negative zero.
double round3(double value);

}  // namespace contacttrees::detail
