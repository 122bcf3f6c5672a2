#include "contacttrees/attribute.hpp"

#include <charconv>
#include <cstdio>

#include "contacttrees/error.hpp"

namespace contacttrees {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedInput: return "MalformedInput";
    case ErrorKind::SchemaViolation: return "SchemaViolation";
    case ErrorKind::DanglingReference: return "DanglingReference";
    case ErrorKind::DuplicateId: return "DuplicateId";
    case ErrorKind::InvalidProfile: return "InvalidProfile";
    case ErrorKind::UnknownPreset: return "UnknownPreset";
    case ErrorKind::IncompatibleKind: return "IncompatibleKind";
    case ErrorKind::MissingAttribute: return "MissingAttribute";
    case ErrorKind::UnmappedValue: return "UnmappedValue";
    case ErrorKind::InvalidMapping: return "InvalidMapping";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::UnknownTie: return "UnknownTie";
    case ErrorKind::UnknownEgo: return "UnknownEgo";
    case ErrorKind::BandOutOfRange: return "BandOutOfRange";
    case ErrorKind::DegeneratePolyline: return "DegeneratePolyline";
  }
  return "Unknown";
}

// --- Date -------------------------------------------------------------------

std::optional<Date> Date::parse(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  auto field = [&](std::size_t pos, std::size_t len, int& out) {
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, out);
    return ec == std::errc{} && ptr == text.data() + pos + len;
  };
  int y = 0, m = 0, d = 0;
  if (!field(0, 4, y) || !field(5, 2, m) || !field(8, 2, d)) return std::nullopt;
  if (m < 1 || d < 1) return std::nullopt;
  std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{unsigned(m)},
                                  std::chrono::day{unsigned(d)}};
  if (!ymd.ok()) return std::nullopt;
  return Date{std::chrono::sys_days{ymd}};
}

Date Date::from_ymd(int year, unsigned month, unsigned day) {
  std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                                  std::chrono::day{day}};
  if (!ymd.ok()) throw Error(ErrorKind::MalformedInput, "invalid calendar day");
  return Date{std::chrono::sys_days{ymd}};
}

std::string Date::iso() const {
  std::chrono::year_month_day ymd{day_};
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", int(ymd.year()), unsigned(ymd.month()),
                unsigned(ymd.day()));
  return buf;
}

// --- Ordinal ----------------------------------------------------------------

std::optional<std::size_t> OrdinalScale::index_of(std::string_view label) const {
  for (std::size_t i = 0; i < levels.size(); ++i)
    if (levels[i] == label) return i;
  return std::nullopt;
}

Ordinal::Ordinal(std::size_t level, std::shared_ptr<const OrdinalScale> scale)
    : level_(level), scale_(std::move(scale)) {
  if (!scale_ || level_ >= scale_->levels.size())
    throw Error(ErrorKind::SchemaViolation, "ordinal level outside its scale");
}

// --- AttributeValue ---------------------------------------------------------

std::string_view to_string(AttributeKind kind) {
  switch (kind) {
    case AttributeKind::Boolean: return "boolean";
    case AttributeKind::Integer: return "integer";
    case AttributeKind::Real: return "real";
    case AttributeKind::Text: return "text";
    case AttributeKind::Date: return "date";
    case AttributeKind::Ordinal: return "ordinal";
  }
  return "text";
}

std::optional<AttributeKind> attribute_kind_from_string(std::string_view text) {
  for (auto k : {AttributeKind::Boolean, AttributeKind::Integer, AttributeKind::Real,
                 AttributeKind::Text, AttributeKind::Date, AttributeKind::Ordinal})
    if (to_string(k) == text) return k;
  return std::nullopt;
}

AttributeKind kind_of(const AttributeValue& value) {
  return static_cast<AttributeKind>(value.index());
}

std::optional<double> numeric_value(const AttributeValue& value) {
  struct Visitor {
    std::optional<double> operator()(bool b) const { return b ? 1.0 : 0.0; }
    std::optional<double> operator()(std::int64_t i) const { return double(i); }
    std::optional<double> operator()(double d) const { return d; }
    std::optional<double> operator()(const std::string&) const { return std::nullopt; }
    std::optional<double> operator()(const Date& d) const { return double(d.days_since_epoch()); }
    std::optional<double> operator()(const Ordinal& o) const { return double(o.level()); }
  };
  return std::visit(Visitor{}, value);
}

std::string display(const AttributeValue& value) {
  struct Visitor {
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(double d) const {
      char buf[32];
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), d);
      return std::string(buf, ptr);
    }
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(const Date& d) const { return d.iso(); }
    std::string operator()(const Ordinal& o) const { return o.label(); }
  };
  return std::visit(Visitor{}, value);
}

// --- Schema -----------------------------------------------------------------

std::string_view to_string(Entity entity) {
  switch (entity) {
    case Entity::Ego: return "ego";
    case Entity::Tie: return "tie";
    case Entity::Contact: return "contact";
  }
  return "tie";
}

std::optional<Entity> entity_from_string(std::string_view text) {
  for (auto e : {Entity::Ego, Entity::Tie, Entity::Contact})
    if (to_string(e) == text) return e;
  return std::nullopt;
}

AttributeSchema::AttributeSchema(std::vector<AttributeDef> entries) {
  for (auto& e : entries) add(std::move(e));
}

void AttributeSchema::add(AttributeDef def) {
  if (def.name.empty()) throw Error(ErrorKind::SchemaViolation, "attribute with empty name");
  if (find(def.entity, def.name))
    throw Error(ErrorKind::SchemaViolation, "duplicate schema entry " +
                                                std::string(to_string(def.entity)) + "." + def.name);
  if (def.kind == AttributeKind::Ordinal) {
    if (!def.scale || def.scale->levels.empty())
      throw Error(ErrorKind::SchemaViolation, "ordinal attribute " + def.name + " has no scale");
  } else {
    def.scale.reset();
  }
  entries_.push_back(std::move(def));
}

const AttributeDef* AttributeSchema::find(Entity entity, std::string_view name) const {
  for (const auto& e : entries_)
    if (e.entity == entity && e.name == name) return &e;
  return nullptr;
}

bool AttributeSchema::operator==(const AttributeSchema& other) const {
  if (entries_.size() != other.entries_.size()) return false;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& a = entries_[i];
    const auto& b = other.entries_[i];
    if (a.name != b.name || a.kind != b.kind || a.entity != b.entity || a.required != b.required)
      return false;
    if (bool(a.scale) != bool(b.scale)) return false;
    if (a.scale && (a.scale->id != b.scale->id || a.scale->levels != b.scale->levels)) return false;
  }
  return true;
}

namespace canonical {

const std::vector<std::string>& liking_levels() {
  static const std::vector<std::string> levels{"not at all", "not much", "somewhat", "very much"};
  return levels;
}

const std::vector<std::string>& feeling_levels() {
  static const std::vector<std::string> levels{"much worse", "worse", "same", "better",
                                               "much better"};
  return levels;
}

}  // namespace canonical

AttributeSchema canonical_schema() {
  using namespace canonical;
  auto liking = std::make_shared<OrdinalScale>(OrdinalScale{std::string(kLiking), liking_levels()});
  auto feeling =
      std::make_shared<OrdinalScale>(OrdinalScale{std::string(kFeeling), feeling_levels()});
  AttributeSchema schema;
  schema.add({std::string(kGender), AttributeKind::Text, Entity::Ego, nullptr, false});
  schema.add({std::string(kAge), AttributeKind::Integer, Entity::Ego, nullptr, false});
  schema.add({std::string(kMaritalStatus), AttributeKind::Text, Entity::Ego, nullptr, false});
  schema.add({std::string(kGender), AttributeKind::Text, Entity::Tie, nullptr, false});
  schema.add({std::string(kAge), AttributeKind::Integer, Entity::Tie, nullptr, false});
  schema.add({std::string(kYearsKnown), AttributeKind::Real, Entity::Tie, nullptr, false});
  schema.add({std::string(kIsStranger), AttributeKind::Boolean, Entity::Tie, nullptr, false});
  schema.add({std::string(kLiking), AttributeKind::Ordinal, Entity::Tie, liking, false});
  schema.add({std::string(kDate), AttributeKind::Date, Entity::Contact, nullptr, true});
  schema.add({std::string(kDuration), AttributeKind::Real, Entity::Contact, nullptr, false});
  schema.add({std::string(kFeeling), AttributeKind::Ordinal, Entity::Contact, feeling, false});
  return schema;
}

}  // namespace contacttrees
