#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace contacttrees {

/// A calendar day. Ordered chronologically; serialized as YYYY-MM-DD.
class Date {
 public:
  Date() = default;
  explicit Date(std::chrono::sys_days day) : day_(day) {}

  /// Parses YYYY-MM-DD. Returns nullopt for malformed text or impossible days.
  static std::optional<Date> parse(std::string_view text);
  static Date from_ymd(int year, unsigned month, unsigned day);

  std::string iso() const;
  std::int64_t days_since_epoch() const { return day_.time_since_epoch().count(); }
  std::chrono::sys_days sys_days() const { return day_; }

  auto operator<=>(const Date&) const = default;

 private:
  std::chrono::sys_days day_{};
};

struct OrdinalScale {
  std::string id;
  std::vector<std::string> levels;

  std::optional<std::size_t> index_of(std::string_view label) const;
};

/// A level on a declared ordinal scale. The scale is shared with the schema.
class Ordinal {
 public:
  Ordinal(std::size_t level, std::shared_ptr<const OrdinalScale> scale);

  std::size_t level() const { return level_; }
  const OrdinalScale& scale() const { return *scale_; }
  std::size_t scale_size() const { return scale_->levels.size(); }
  const std::string& label() const { return scale_->levels[level_]; }

  bool operator==(const Ordinal& other) const {
    return level_ == other.level_ && scale_->id == other.scale_->id;
  }
  std::strong_ordering operator<=>(const Ordinal& other) const {
    if (auto c = scale_->id <=> other.scale_->id; c != 0) return c;
    return level_ <=> other.level_;
  }

 private:
  std::size_t level_;
  std::shared_ptr<const OrdinalScale> scale_;
};

enum class AttributeKind { Boolean, Integer, Real, Text, Date, Ordinal };

std::string_view to_string(AttributeKind kind);
std::optional<AttributeKind> attribute_kind_from_string(std::string_view text);

/// Alternative order matches AttributeKind.
using AttributeValue = std::variant<bool, std::int64_t, double, std::string, Date, Ordinal>;
using AttributeMap = std::map<std::string, AttributeValue>;

AttributeKind kind_of(const AttributeValue& value);

/// Numeric reading used for thresholds and ordering: integers and reals as-is,
/// ordinals by level, dates by day number, booleans as 0/1. Text has none.
std::optional<double> numeric_value(const AttributeValue& value);

/// Human-readable form: ordinal label, ISO date, "true"/"false", shortest number.
std::string display(const AttributeValue& value);

enum class Entity { Ego, Tie, Contact };

std::string_view to_string(Entity entity);
std::optional<Entity> entity_from_string(std::string_view text);

struct AttributeDef {
  std::string name;
  AttributeKind kind = AttributeKind::Text;
  Entity entity = Entity::Tie;
  std::shared_ptr<const OrdinalScale> scale;  // set iff kind == Ordinal
  bool required = false;
};

/// Attribute declarations, unique per (entity, name).
class AttributeSchema {
 public:
  AttributeSchema() = default;
  explicit AttributeSchema(std::vector<AttributeDef> entries);

  /// Adds an entry; throws SchemaViolation on duplicate (entity, name) or an
  /// Ordinal without levels.
  void add(AttributeDef def);

  const AttributeDef* find(Entity entity, std::string_view name) const;
  const std::vector<AttributeDef>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  bool operator==(const AttributeSchema& other) const;

 private:
  std::vector<AttributeDef> entries_;
};

/// Schema declaring the canonical diary attributes used by the presets.
AttributeSchema canonical_schema();

namespace canonical {
inline constexpr std::string_view kGender = "gender";
inline constexpr std::string_view kAge = "age";
inline constexpr std::string_view kMaritalStatus = "marital_status";
inline constexpr std::string_view kYearsKnown = "years_known";
inline constexpr std::string_view kIsStranger = "is_stranger";
inline constexpr std::string_view kLiking = "liking";
inline constexpr std::string_view kDate = "date";
inline constexpr std::string_view kDuration = "duration";
inline constexpr std::string_view kFeeling = "feeling";

const std::vector<std::string>& liking_levels();
const std::vector<std::string>& feeling_levels();
}  // namespace canonical

}  // namespace contacttrees
