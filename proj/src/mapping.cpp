#include "contacttrees/mapping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "contacttrees/error.hpp"
#include "json_util.hpp"

namespace contacttrees {

using detail::json;

std::string_view to_string(Side side) { return side == Side::Left ? "left" : "right"; }
std::string_view to_string(BranchSide side) {
  return side == BranchSide::Above ? "above" : "below";
}
std::string_view to_string(LeafSide side) {
  switch (side) {
    case LeafSide::Above: return "above";
    case LeafSide::Below: return "below";
    case LeafSide::Alternate: return "alternate";
  }
  return "alternate";
}

// --- Predicate --------------------------------------------------------------

Predicate Predicate::equals(std::string attribute, std::string value) {
  return {std::move(attribute), Op::Equals, {std::move(value)}, 0.0};
}

Predicate Predicate::any_of(std::string attribute, std::vector<std::string> values) {
  return {std::move(attribute), Op::In, std::move(values), 0.0};
}

Predicate Predicate::compare(std::string attribute, Op op, double threshold) {
  return {std::move(attribute), op, {}, threshold};
}

bool Predicate::test(const AttributeValue& value) const {
  if (!is_ordering()) {
    auto text = display(value);
    return std::find(values.begin(), values.end(), text) != values.end();
  }
  auto x = numeric_value(value);
  if (!x) return false;
  switch (op) {
    case Op::GreaterEqual: return *x >= threshold;
    case Op::Greater: return *x > threshold;
    case Op::LessEqual: return *x <= threshold;
    case Op::Less: return *x < threshold;
    default: return false;
  }
}

std::string Predicate::describe(bool negated) const {
  auto number = [](double v) { return display(AttributeValue{v}); };
  switch (op) {
    case Op::Equals:
      return attribute + (negated ? " \xE2\x89\xA0 " : " = ") + (values.empty() ? "" : values[0]);
    case Op::In: {
      std::string list;
      for (const auto& v : values) list += (list.empty() ? "" : ", ") + v;
      return attribute + (negated ? " \xE2\x88\x89 {" : " \xE2\x88\x88 {") + list + "}";
    }
    case Op::GreaterEqual:
      return attribute + (negated ? " < " : " \xE2\x89\xA5 ") + number(threshold);
    case Op::Greater:
      return attribute + (negated ? " \xE2\x89\xA4 " : " > ") + number(threshold);
    case Op::LessEqual:
      return attribute + (negated ? " > " : " \xE2\x89\xA4 ") + number(threshold);
    case Op::Less:
      return attribute + (negated ? " \xE2\x89\xA5 " : " < ") + number(threshold);
  }
  return attribute;
}

// --- presets ----------------------------------------------------------------

namespace {

LeafSizeRule default_leaf_size() { return {std::string(canonical::kDuration), std::nullopt}; }
LeafDarknessRule default_leaf_darkness() { return {std::string(canonical::kFeeling), true}; }

MappingSpec diary_default() {
  using namespace canonical;
  MappingSpec m;
  m.name = std::string(kPresetDiaryDefault);
  m.trunk_side = {Predicate::equals(std::string(kGender), "male"), Side::Left,
                  Predicate::any_of(std::string(kGender), {"male", "female"}), "male", "female"};
  m.trunk_position.source = std::string(kAge);
  m.trunk_position.kind = BinningSpec::Kind::DecadeBins;
  for (int d = 0; d < 10; ++d)
    m.trunk_position.band_labels.push_back(std::to_string(d * 10) + "\xE2\x80\x93" +
                                           std::to_string(d * 10 + 9));
  m.branch_side = {Predicate::compare(std::string(kYearsKnown), Predicate::Op::GreaterEqual, 5),
                   "known \xE2\x89\xA5 5 years", "known < 5 years"};
  m.fruit_count = {std::string(kLiking),
                   {{"not at all", 0}, {"not much", 0}, {"somewhat", 1}, {"very much", 2}}};
  m.leaf_order = std::string(kDate);
  m.leaf_size = default_leaf_size();
  m.leaf_darkness = default_leaf_darkness();
  m.ego_glyph = EgoGlyphRule{Predicate::equals(std::string(kGender), "male"), Side::Left,
                             std::string(kAge), std::string(kMaritalStatus), {"married"}};
  return m;
}

MappingSpec liking_tenure() {
  using namespace canonical;
  MappingSpec m;
  m.name = std::string(kPresetLikingTenure);
  m.trunk_side = {Predicate::equals(std::string(kLiking), "very much"), Side::Right,
                  Predicate::any_of(std::string(kLiking), {"somewhat", "very much"}), "very much",
                  "somewhat"};
  m.trunk_position.source = std::string(kYearsKnown);
  m.trunk_position.kind = BinningSpec::Kind::ThresholdBins;
  m.trunk_position.edges = {0, 1, 5, 20};
  m.trunk_position.band_labels = {"strangers", "<1y", "1\xE2\x80\x93" "4y",
                                  "5\xE2\x80\x93" "19y", "\xE2\x89\xA5" "20y"};
  m.trunk_position.overrides = {{Predicate::equals(std::string(kIsStranger), "true"), 0}};
  m.trunk_position.absent_band = 0;
  m.branch_side = {Predicate::compare(std::string(kAge), Predicate::Op::Greater, 40),
                   "older than 40", "40 or younger"};
  m.fruit_count = {std::string(kGender), {{"male", 1}, {"female", 2}}};
  m.leaf_order = std::string(kDate);
  m.leaf_size = default_leaf_size();
  m.leaf_darkness = default_leaf_darkness();
  return m;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {std::string(kPresetDiaryDefault), std::string(kPresetLikingTenure)};
}

MappingSpec preset_mapping(std::string_view name) {
  if (name == kPresetDiaryDefault) return diary_default();
  if (name == kPresetLikingTenure) return liking_tenure();
  throw Error(ErrorKind::UnknownPreset, "unknown mapping preset '" + std::string(name) + "'");
}

// --- validation -------------------------------------------------------------

namespace {

bool is_numeric(AttributeKind k) {
  return k == AttributeKind::Integer || k == AttributeKind::Real;
}
bool is_orderable(AttributeKind k) {
  return is_numeric(k) || k == AttributeKind::Date || k == AttributeKind::Ordinal;
}

class MappingChecker {
 public:
  MappingChecker(const AttributeSchema& schema, ValidationReport& report)
      : schema_(schema), report_(report) {}

  void error(const std::string& channel, std::string_view rule, const std::string& message) {
    report_.errors.push_back({"mapping", channel, std::string(rule), message});
  }

  const AttributeDef* source(const std::string& channel, Entity entity, const std::string& name) {
    const auto* def = schema_.find(entity, name);
    if (!def)
      error(channel, "missing-source",
            "source attribute '" + name + "' is not a " + std::string(to_string(entity)) +
                " attribute in the schema");
    return def;
  }

  void kind(const std::string& channel, const AttributeDef* def, bool ok, std::string_view need) {
    if (def && !ok)
      error(channel, "incompatible-kind",
            "attribute '" + def->name + "' is " + std::string(to_string(def->kind)) + ", needs " +
                std::string(need));
  }

  void predicate(const std::string& channel, Entity entity, const Predicate& p) {
    const auto* def = source(channel, entity, p.attribute);
    if (!def) return;
    if (p.is_ordering()) {
      kind(channel, def, is_orderable(def->kind) || def->kind == AttributeKind::Boolean,
           "an orderable kind");
      return;
    }
    if (p.values.empty()) error(channel, "empty-predicate", "predicate lists no values");
    for (const auto& v : p.values) {
      bool known = true;
      if (def->kind == AttributeKind::Ordinal) known = def->scale->index_of(v).has_value();
      if (def->kind == AttributeKind::Boolean) known = v == "true" || v == "false";
      if (!known)
        error(channel, "unknown-level",
              "'" + v + "' is not a possible value of '" + def->name + "'");
    }
  }

  void binning(const std::string& channel, Entity entity, const BinningSpec& b,
               const std::string& source_name) {
    const auto* def = source(channel, entity, source_name);
    if (b.band_labels.empty()) error(channel, "bad-binning", "binning declares no bands");
    switch (b.kind) {
      case BinningSpec::Kind::DecadeBins:
        kind(channel, def, def && is_numeric(def->kind), "integer or real");
        break;
      case BinningSpec::Kind::ThresholdBins:
        kind(channel, def, def && is_numeric(def->kind), "integer or real");
        for (std::size_t i = 1; i < b.edges.size(); ++i)
          if (!(b.edges[i] > b.edges[i - 1]))
            error(channel, "bad-binning", "threshold edges must be strictly ascending");
        if (b.band_labels.size() != b.edges.size() + 1)
          error(channel, "bad-binning", "threshold bins need one label per edge plus one");
        break;
      case BinningSpec::Kind::OrdinalPassthrough:
        kind(channel, def, def && def->kind == AttributeKind::Ordinal, "ordinal");
        if (def && def->kind == AttributeKind::Ordinal &&
            def->scale->levels.size() != b.band_labels.size())
          error(channel, "bad-binning", "ordinal passthrough needs one label per scale level");
        break;
    }
    for (const auto& o : b.overrides) {
      predicate(channel, entity, o.when);
      if (o.band >= b.band_count()) error(channel, "bad-binning", "override band out of range");
    }
    if (b.absent_band && *b.absent_band >= b.band_count())
      error(channel, "bad-binning", "absent band out of range");
  }

 private:
  const AttributeSchema& schema_;
  ValidationReport& report_;
};

}  // namespace

ValidationReport validate_mapping(const MappingSpec& spec, const AttributeSchema& schema) {
  ValidationReport report;
  MappingChecker check(schema, report);

  check.predicate("trunk_side", Entity::Tie, spec.trunk_side.when);
  if (spec.trunk_side.admit) check.predicate("trunk_side", Entity::Tie, *spec.trunk_side.admit);

  check.binning("trunk_position", Entity::Tie, spec.trunk_position, spec.trunk_position.source);
  check.predicate("branch_side", Entity::Tie, spec.branch_side.above_when);

  if (const auto* def = check.source("fruit_count", Entity::Tie, spec.fruit_count.source)) {
    for (const auto& [label, n] : spec.fruit_count.table)
      if (n < 0 || n > 2)
        check.error("fruit_count", "fruit-out-of-range",
                    "fruit count for '" + label + "' must be 0, 1 or 2");
    std::vector<std::string> domain;
    if (def->kind == AttributeKind::Ordinal) domain = def->scale->levels;
    if (def->kind == AttributeKind::Boolean) domain = {"false", "true"};
    for (const auto& level : domain)
      if (!spec.fruit_count.table.count(level))
        check.error("fruit_count", "partial-fruit-table",
                    "PartialFruitTable: no fruit count for level '" + level + "'");
    if (spec.fruit_count.table.empty())
      check.error("fruit_count", "partial-fruit-table", "PartialFruitTable: table is empty");
  }

  {
    const auto* d = check.source("leaf_order", Entity::Contact, spec.leaf_order);
    check.kind("leaf_order", d, d && is_orderable(d->kind), "an orderable kind");
  }
  {
    const auto* d = check.source("leaf_size", Entity::Contact, spec.leaf_size.source);
    check.kind("leaf_size", d, d && is_numeric(d->kind), "integer or real");
    if (spec.leaf_size.fixed_range && !(spec.leaf_size.fixed_range->first <=
                                        spec.leaf_size.fixed_range->second))
      check.error("leaf_size", "bad-range", "fixed range must have min <= max");
  }
  {
    const auto* d = check.source("leaf_darkness", Entity::Contact, spec.leaf_darkness.source);
    check.kind("leaf_darkness", d,
               d && (is_numeric(d->kind) || d->kind == AttributeKind::Ordinal),
               "ordinal, integer or real");
  }
  if (spec.leaf_side.mode == LeafSideRule::Mode::ByPredicate)
    check.predicate("leaf_side", Entity::Contact, spec.leaf_side.above_when);

  if (spec.ego_glyph) {
    const auto& g = *spec.ego_glyph;
    check.predicate("ego_glyph", Entity::Ego, g.side_when);
    check.binning("ego_glyph", Entity::Ego, spec.trunk_position, g.band_source);
    check.source("ego_glyph", Entity::Ego, g.count_source);
  }

  std::stable_sort(report.errors.begin(), report.errors.end(),
                   [](const auto& a, const auto& b) { return a.id < b.id; });
  return report;
}

// --- resolution -------------------------------------------------------------

std::size_t bin_value(const BinningSpec& spec, const AttributeValue& value) {
  if (spec.band_labels.empty()) throw Error(ErrorKind::InvalidMapping, "binning has no bands");
  const std::size_t last = spec.band_labels.size() - 1;
  switch (spec.kind) {
    case BinningSpec::Kind::DecadeBins:
    case BinningSpec::Kind::ThresholdBins: {
      auto k = kind_of(value);
      if (k != AttributeKind::Integer && k != AttributeKind::Real)
        throw Error(ErrorKind::IncompatibleKind, "cannot bin a " + std::string(to_string(k)) +
                                                     " value of '" + spec.source + "'");
      double x = *numeric_value(value);
      if (!std::isfinite(x))
        throw Error(ErrorKind::IncompatibleKind, "non-finite value of '" + spec.source + "'");
      std::size_t band = 0;
      if (spec.kind == BinningSpec::Kind::DecadeBins) {
        double d = std::floor(x / 10.0);
        band = d <= 0 ? 0 : d >= double(last) ? last : std::size_t(d);
      } else {
        band = std::size_t(std::count_if(spec.edges.begin(), spec.edges.end(),
                                         [&](double e) { return e <= x; }));
      }
      return std::min(band, last);
    }
    case BinningSpec::Kind::OrdinalPassthrough: {
      if (kind_of(value) != AttributeKind::Ordinal)
        throw Error(ErrorKind::IncompatibleKind, "'" + spec.source + "' must be ordinal");
      return std::min(std::get<Ordinal>(value).level(), last);
    }
  }
  return 0;
}

namespace {

const AttributeValue& require_attribute(const AttributeMap& attributes, const std::string& name,
                                        const std::string& record_id) {
  auto it = attributes.find(name);
  if (it == attributes.end())
    throw Error(ErrorKind::MissingAttribute,
                "'" + record_id + "' lacks attribute '" + name + "'");
  return it->second;
}

std::size_t band_from(const BinningSpec& spec, const std::string& source,
                      const AttributeMap& attributes, const std::string& record_id) {
  for (const auto& o : spec.overrides) {
    auto it = attributes.find(o.when.attribute);
    if (it != attributes.end() && o.when.test(it->second)) return o.band;
  }
  auto it = attributes.find(source);
  if (it == attributes.end()) {
    if (spec.absent_band) return *spec.absent_band;
    throw Error(ErrorKind::MissingAttribute,
                "'" + record_id + "' lacks attribute '" + source + "'");
  }
  return bin_value(spec, it->second);
}

double normalized(double x, double lo, double hi) {
  if (!(hi > lo)) return 0.5;
  return std::clamp((x - lo) / (hi - lo), 0.0, 1.0);
}

}  // namespace

std::size_t resolve_band(const BinningSpec& spec, const AttributeMap& attributes,
                         const std::string& record_id) {
  return band_from(spec, spec.source, attributes, record_id);
}

TieChannelValues resolve_tie_channels(const MappingSpec& spec, const Tie& tie) {
  TieChannelValues out;
  out.tie = tie.id;

  const auto& side_value = require_attribute(tie.attributes, spec.trunk_side.when.attribute, tie.id);
  if (spec.trunk_side.admit) {
    const auto& admit_value =
        require_attribute(tie.attributes, spec.trunk_side.admit->attribute, tie.id);
    if (!spec.trunk_side.admit->test(admit_value))
      throw Error(ErrorKind::UnmappedValue, "'" + tie.id + "' has " +
                                                spec.trunk_side.admit->attribute + " '" +
                                                display(admit_value) +
                                                "' outside the mapping's domain");
  }
  bool hit = spec.trunk_side.when.test(side_value);
  Side other = spec.trunk_side.when_true == Side::Left ? Side::Right : Side::Left;
  out.side = hit ? spec.trunk_side.when_true : other;

  out.band = resolve_band(spec.trunk_position, tie.attributes, tie.id);

  const auto& branch_value =
      require_attribute(tie.attributes, spec.branch_side.above_when.attribute, tie.id);
  out.branch_side = spec.branch_side.above_when.test(branch_value) ? BranchSide::Above
                                                                   : BranchSide::Below;

  const auto& fruit_value = require_attribute(tie.attributes, spec.fruit_count.source, tie.id);
  auto it = spec.fruit_count.table.find(display(fruit_value));
  if (it == spec.fruit_count.table.end())
    throw Error(ErrorKind::UnmappedValue, "'" + tie.id + "' has " + spec.fruit_count.source +
                                              " '" + display(fruit_value) +
                                              "' missing from the fruit table");
  out.fruit_count = std::clamp(it->second, 0, 2);
  return out;
}

LeafChannelValues resolve_contact_channels(const MappingSpec& spec, const Contact& contact,
                                           const LeafNorms& norms) {
  LeafChannelValues out;
  out.contact = contact.id;

  const auto& order = require_attribute(contact.attributes, spec.leaf_order, contact.id);
  auto key = numeric_value(order);
  if (!key)
    throw Error(ErrorKind::IncompatibleKind, "'" + spec.leaf_order + "' is not orderable");
  out.order_key = *key;

  const auto& size_value = require_attribute(contact.attributes, spec.leaf_size.source, contact.id);
  double size_x = numeric_value(size_value).value_or(0.0);
  if (spec.leaf_size.fixed_range)
    out.size = normalized(size_x, spec.leaf_size.fixed_range->first,
                          spec.leaf_size.fixed_range->second);
  else
    out.size = normalized(size_x, norms.size_min, norms.size_max);
  if (!std::isfinite(out.size)) out.size = 0.5;

  const auto& dark_value =
      require_attribute(contact.attributes, spec.leaf_darkness.source, contact.id);
  if (const auto* o = std::get_if<Ordinal>(&dark_value)) {
    out.darkness = o->scale_size() > 1 ? double(o->level()) / double(o->scale_size() - 1) : 0.5;
  } else {
    out.darkness =
        normalized(numeric_value(dark_value).value_or(0.0), norms.darkness_min, norms.darkness_max);
  }
  if (!std::isfinite(out.darkness)) out.darkness = 0.5;
  out.darkness = std::clamp(out.darkness, 0.0, 1.0);
  if (!spec.leaf_darkness.higher_is_darker) out.darkness = 1.0 - out.darkness;

  if (spec.leaf_side.mode == LeafSideRule::Mode::ByPredicate) {
    const auto& v =
        require_attribute(contact.attributes, spec.leaf_side.above_when.attribute, contact.id);
    out.side = spec.leaf_side.above_when.test(v) ? LeafSide::Above : LeafSide::Below;
  } else {
    out.side = LeafSide::Alternate;
  }
  return out;
}

EgoChannelValues resolve_ego_channels(const MappingSpec& spec, const Ego& ego) {
  if (!spec.ego_glyph)
    throw Error(ErrorKind::InvalidMapping, "mapping '" + spec.name + "' has no ego glyph");
  const auto& g = *spec.ego_glyph;
  EgoChannelValues out;
  const auto& side_value = require_attribute(ego.attributes, g.side_when.attribute, ego.id);
  Side other = g.when_true == Side::Left ? Side::Right : Side::Left;
  out.side = g.side_when.test(side_value) ? g.when_true : other;
  out.band = band_from(spec.trunk_position, g.band_source, ego.attributes, ego.id);
  const auto& count_value = require_attribute(ego.attributes, g.count_source, ego.id);
  auto text = display(count_value);
  out.count = std::find(g.two_bird_values.begin(), g.two_bird_values.end(), text) !=
                      g.two_bird_values.end()
                  ? 2
                  : 1;
  return out;
}

LeafNorms compute_leaf_norms(const MappingSpec& spec, std::span<const Contact* const> contacts) {
  LeafNorms n;
  double smin = std::numeric_limits<double>::infinity(), smax = -smin;
  double dmin = smin, dmax = -smin;
  for (const auto* c : contacts) {
    if (auto it = c->attributes.find(spec.leaf_size.source); it != c->attributes.end())
      if (auto v = numeric_value(it->second)) {
        smin = std::min(smin, *v);
        smax = std::max(smax, *v);
      }
    if (auto it = c->attributes.find(spec.leaf_darkness.source); it != c->attributes.end())
      if (auto v = numeric_value(it->second)) {
        dmin = std::min(dmin, *v);
        dmax = std::max(dmax, *v);
      }
  }
  if (smin <= smax) n.size_min = smin, n.size_max = smax;
  if (dmin <= dmax) n.darkness_min = dmin, n.darkness_max = dmax;
  return n;
}

// --- JSON -------------------------------------------------------------------

namespace {

constexpr std::pair<Predicate::Op, const char*> kOps[] = {
    {Predicate::Op::Equals, "eq"},       {Predicate::Op::In, "in"},
    {Predicate::Op::GreaterEqual, "ge"}, {Predicate::Op::Greater, "gt"},
    {Predicate::Op::LessEqual, "le"},    {Predicate::Op::Less, "lt"},
};

[[noreturn]] void bad(const std::string& what) {
  throw Error(ErrorKind::InvalidMapping, "mapping: " + what);
}

json predicate_to_json(const Predicate& p) {
  const char* op = "eq";
  for (auto [o, name] : kOps)
    if (o == p.op) op = name;
  json j{{"attribute", p.attribute}, {"op", op}};
  if (p.is_ordering())
    j["threshold"] = p.threshold;
  else
    j["values"] = p.values;
  return j;
}

Predicate predicate_from_json(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("attribute") || !j.contains("op"))
    bad(where + " must be {attribute, op, ...}");
  Predicate p;
  p.attribute = j.at("attribute").get<std::string>();
  auto op = j.at("op").get<std::string>();
  bool found = false;
  for (auto [o, name] : kOps)
    if (op == name) p.op = o, found = true;
  if (!found) bad(where + ": unknown op '" + op + "'");
  if (p.is_ordering()) {
    if (!j.contains("threshold") || !j.at("threshold").is_number())
      bad(where + ": ordering op needs a numeric threshold");
    p.threshold = j.at("threshold").get<double>();
  } else {
    if (j.contains("values")) {
      p.values = j.at("values").get<std::vector<std::string>>();
    } else if (j.contains("value")) {
      p.values = {j.at("value").get<std::string>()};
    } else {
      bad(where + ": equality op needs values");
    }
  }
  return p;
}

const char* side_name(Side s) { return s == Side::Left ? "left" : "right"; }
Side side_from(const json& j, const std::string& where) {
  auto s = j.get<std::string>();
  if (s == "left") return Side::Left;
  if (s == "right") return Side::Right;
  bad(where + ": side must be left or right");
}

const char* binning_kind_name(BinningSpec::Kind k) {
  switch (k) {
    case BinningSpec::Kind::DecadeBins: return "decade-bins";
    case BinningSpec::Kind::ThresholdBins: return "threshold-bins";
    case BinningSpec::Kind::OrdinalPassthrough: return "ordinal-passthrough";
  }
  return "decade-bins";
}

json binning_to_json(const BinningSpec& b) {
  json j{{"source", b.source},
         {"kind", binning_kind_name(b.kind)},
         {"band_labels", b.band_labels},
         {"edges", b.edges},
         {"overrides", json::array()}};
  for (const auto& o : b.overrides)
    j["overrides"].push_back({{"when", predicate_to_json(o.when)}, {"band", o.band}});
  j["absent_band"] = b.absent_band ? json(*b.absent_band) : json(nullptr);
  return j;
}

BinningSpec binning_from_json(const json& j) {
  BinningSpec b;
  b.source = j.at("source").get<std::string>();
  auto kind = j.at("kind").get<std::string>();
  if (kind == "decade-bins")
    b.kind = BinningSpec::Kind::DecadeBins;
  else if (kind == "threshold-bins")
    b.kind = BinningSpec::Kind::ThresholdBins;
  else if (kind == "ordinal-passthrough")
    b.kind = BinningSpec::Kind::OrdinalPassthrough;
  else
    bad("unknown binning kind '" + kind + "'");
  b.band_labels = j.at("band_labels").get<std::vector<std::string>>();
  b.edges = j.value("edges", std::vector<double>{});
  if (j.contains("overrides"))
    for (const auto& o : j.at("overrides"))
      b.overrides.push_back({predicate_from_json(o.at("when"), "trunk_position.overrides"),
                             o.at("band").get<std::size_t>()});
  if (j.contains("absent_band") && !j.at("absent_band").is_null())
    b.absent_band = j.at("absent_band").get<std::size_t>();
  return b;
}

}  // namespace

std::string serialize_mapping_json(const MappingSpec& m) {
  json j;
  j["name"] = m.name;
  j["trunk_side"] = {{"when", predicate_to_json(m.trunk_side.when)},
                     {"when_true", side_name(m.trunk_side.when_true)},
                     {"admit", m.trunk_side.admit ? predicate_to_json(*m.trunk_side.admit)
                                                  : json(nullptr)},
                     {"true_label", m.trunk_side.true_label},
                     {"false_label", m.trunk_side.false_label}};
  j["trunk_position"] = binning_to_json(m.trunk_position);
  j["branch_side"] = {{"above_when", predicate_to_json(m.branch_side.above_when)},
                      {"above_label", m.branch_side.above_label},
                      {"below_label", m.branch_side.below_label}};
  j["fruit_count"] = {{"source", m.fruit_count.source}, {"table", m.fruit_count.table}};
  j["leaf_order"] = m.leaf_order;
  j["leaf_size"] = {{"source", m.leaf_size.source},
                    {"fixed_range", m.leaf_size.fixed_range
                                        ? json::array({m.leaf_size.fixed_range->first,
                                                       m.leaf_size.fixed_range->second})
                                        : json(nullptr)}};
  j["leaf_darkness"] = {{"source", m.leaf_darkness.source},
                        {"higher_is_darker", m.leaf_darkness.higher_is_darker}};
  if (m.leaf_side.mode == LeafSideRule::Mode::Alternate)
    j["leaf_side"] = {{"mode", "alternate"}};
  else
    j["leaf_side"] = {{"mode", "predicate"},
                      {"above_when", predicate_to_json(m.leaf_side.above_when)},
                      {"above_label", m.leaf_side.above_label},
                      {"below_label", m.leaf_side.below_label}};
  if (m.ego_glyph)
    j["ego_glyph"] = {{"side_when", predicate_to_json(m.ego_glyph->side_when)},
                      {"when_true", side_name(m.ego_glyph->when_true)},
                      {"band_source", m.ego_glyph->band_source},
                      {"count_source", m.ego_glyph->count_source},
                      {"two_bird_values", m.ego_glyph->two_bird_values}};
  else
    j["ego_glyph"] = nullptr;
  return j.dump(2) + "\n";
}

MappingSpec parse_mapping_json(std::string_view bytes) {
  json j;
  try {
    j = detail::parse_json_text(bytes, "mapping");
  } catch (const Error& e) {
    throw Error(ErrorKind::InvalidMapping, e.what());
  }
  if (!j.is_object()) bad("top level must be an object");
  MappingSpec m;
  try {
    m.name = j.value("name", std::string("custom"));
    const auto& ts = j.at("trunk_side");
    m.trunk_side.when = predicate_from_json(ts.at("when"), "trunk_side.when");
    m.trunk_side.when_true = side_from(ts.at("when_true"), "trunk_side.when_true");
    if (ts.contains("admit") && !ts.at("admit").is_null())
      m.trunk_side.admit = predicate_from_json(ts.at("admit"), "trunk_side.admit");
    m.trunk_side.true_label = ts.value("true_label", std::string{});
    m.trunk_side.false_label = ts.value("false_label", std::string{});
    m.trunk_position = binning_from_json(j.at("trunk_position"));
    const auto& bs = j.at("branch_side");
    m.branch_side.above_when = predicate_from_json(bs.at("above_when"), "branch_side.above_when");
    m.branch_side.above_label = bs.value("above_label", std::string{});
    m.branch_side.below_label = bs.value("below_label", std::string{});
    const auto& fc = j.at("fruit_count");
    m.fruit_count.source = fc.at("source").get<std::string>();
    m.fruit_count.table = fc.at("table").get<std::map<std::string, int>>();
    m.leaf_order = j.at("leaf_order").get<std::string>();
    const auto& ls = j.at("leaf_size");
    m.leaf_size.source = ls.at("source").get<std::string>();
    if (ls.contains("fixed_range") && !ls.at("fixed_range").is_null()) {
      auto r = ls.at("fixed_range").get<std::vector<double>>();
      if (r.size() != 2) bad("leaf_size.fixed_range must be [min, max]");
      m.leaf_size.fixed_range = std::pair{r[0], r[1]};
    }
    const auto& ld = j.at("leaf_darkness");
    m.leaf_darkness.source = ld.at("source").get<std::string>();
    m.leaf_darkness.higher_is_darker = ld.value("higher_is_darker", true);
    if (j.contains("leaf_side")) {
      const auto& lsd = j.at("leaf_side");
      auto mode = lsd.value("mode", std::string("alternate"));
      if (mode == "predicate") {
        m.leaf_side.mode = LeafSideRule::Mode::ByPredicate;
        m.leaf_side.above_when = predicate_from_json(lsd.at("above_when"), "leaf_side.above_when");
        m.leaf_side.above_label = lsd.value("above_label", std::string{});
        m.leaf_side.below_label = lsd.value("below_label", std::string{});
      } else if (mode != "alternate") {
        bad("leaf_side.mode must be alternate or predicate");
      }
    }
    if (j.contains("ego_glyph") && !j.at("ego_glyph").is_null()) {
      const auto& g = j.at("ego_glyph");
      EgoGlyphRule rule;
      rule.side_when = predicate_from_json(g.at("side_when"), "ego_glyph.side_when");
      rule.when_true = side_from(g.at("when_true"), "ego_glyph.when_true");
      rule.band_source = g.at("band_source").get<std::string>();
      rule.count_source = g.at("count_source").get<std::string>();
      rule.two_bird_values = g.value("two_bird_values", std::vector<std::string>{});
      m.ego_glyph = std::move(rule);
    }
  } catch (const json::exception& e) {
    bad(e.what());
  }
  return m;
}

}  // namespace contacttrees
