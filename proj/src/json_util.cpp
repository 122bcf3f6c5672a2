#include "json_util.hpp"

#include <charconv>
#include <cmath>

#include "contacttrees/error.hpp"

namespace contacttrees::detail {

namespace {

[[noreturn]] void mismatch(const std::string& where, const AttributeDef& def) {
  throw Error(ErrorKind::SchemaViolation,
              where + ": expected " + std::string(to_string(def.kind)) + " value");
}

std::optional<AttributeValue> infer(const json& value, const std::string& where) {
  if (value.is_boolean()) return value.get<bool>();
  if (value.is_number_integer()) return value.get<std::int64_t>();
  if (value.is_number_float()) return value.get<double>();
  if (value.is_string()) return value.get<std::string>();
  throw Error(ErrorKind::SchemaViolation, where + ": unsupported value type");
}

}  // namespace

std::optional<AttributeValue> decode_attribute(const json& value, const AttributeDef* def,
                                               const std::string& where) {
  if (value.is_null()) return std::nullopt;
  if (!def) return infer(value, where);
  switch (def->kind) {
    case AttributeKind::Boolean:
      if (!value.is_boolean()) mismatch(where, *def);
      return value.get<bool>();
    case AttributeKind::Integer:
      if (!value.is_number_integer()) mismatch(where, *def);
      return value.get<std::int64_t>();
    case AttributeKind::Real:
      if (!value.is_number()) mismatch(where, *def);
      return value.get<double>();
    case AttributeKind::Text:
      if (!value.is_string()) mismatch(where, *def);
      return value.get<std::string>();
    case AttributeKind::Date: {
      if (!value.is_string()) mismatch(where, *def);
      auto d = Date::parse(value.get<std::string>());
      if (!d) mismatch(where, *def);
      return *d;
    }
    case AttributeKind::Ordinal: {
      if (value.is_string()) {
        auto idx = def->scale->index_of(value.get<std::string>());
        if (!idx)
          throw Error(ErrorKind::SchemaViolation,
                      where + ": '" + value.get<std::string>() + "' is not a level of scale " +
                          def->scale->id);
        return Ordinal(*idx, def->scale);
      }
      if (value.is_number_integer()) {
        auto level = value.get<std::int64_t>();
        if (level < 0 || std::size_t(level) >= def->scale->levels.size())
          throw Error(ErrorKind::SchemaViolation, where + ": ordinal level out of range");
        return Ordinal(std::size_t(level), def->scale);
      }
      mismatch(where, *def);
    }
  }
  mismatch(where, *def);
}

std::optional<AttributeValue> decode_cell(std::string_view cell, const AttributeDef& def,
                                          const std::string& where) {
  if (cell.empty()) return std::nullopt;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  switch (def.kind) {
    case AttributeKind::Boolean:
      if (cell == "true" || cell == "1") return true;
      if (cell == "false" || cell == "0") return false;
      break;
    case AttributeKind::Integer: {
      std::int64_t v = 0;
      auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec == std::errc{} && ptr == last) return v;
      break;
    }
    case AttributeKind::Real: {
      double v = 0;
      auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec == std::errc{} && ptr == last && std::isfinite(v)) return v;
      break;
    }
    case AttributeKind::Text:
      return std::string(cell);
    case AttributeKind::Date:
      if (auto d = Date::parse(cell)) return *d;
      break;
    case AttributeKind::Ordinal:
      if (auto idx = def.scale->index_of(cell)) return Ordinal(*idx, def.scale);
      break;
  }
  throw Error(ErrorKind::SchemaViolation, where + ": '" + std::string(cell) + "' is not a valid " +
                                              std::string(to_string(def.kind)) + " value");
}

json encode_attribute(const AttributeValue& value) {
  struct Visitor {
    json operator()(bool b) const { return b; }
    json operator()(std::int64_t i) const { return i; }
    json operator()(double d) const { return d; }
    json operator()(const std::string& s) const { return s; }
    json operator()(const Date& d) const { return d.iso(); }
    json operator()(const Ordinal& o) const { return o.label(); }
  };
  return std::visit(Visitor{}, value);
}

std::string cell_text(const AttributeValue& value) { return display(value); }

json attributes_to_json(const AttributeMap& attributes) {
  json out = json::object();
  for (const auto& [name, value] : attributes) out[name] = encode_attribute(value);
  return out;
}

json parse_json_text(std::string_view bytes, std::string_view what) {
  try {
    return json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::MalformedInput, std::string(what) + ": byte " +
                                               std::to_string(e.byte) + ": " + e.what());
  }
}

double round3(double value) {
  double r = std::round(value * 1000.0) / 1000.0;
  return r == 0.0 ? 0.0 : r;
}

}  // namespace contacttrees::detail
