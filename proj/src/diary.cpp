#include "contacttrees/diary.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

#include "contacttrees/error.hpp"
#include "csv.hpp"
#include "json_util.hpp"

namespace contacttrees {

using detail::json;

const Ego* Diary::find_ego(std::string_view id) const {
  for (const auto& e : egos)
    if (e.id == id) return &e;
  return nullptr;
}

const Tie* Diary::find_tie(std::string_view id) const {
  for (const auto& t : ties)
    if (t.id == id) return &t;
  return nullptr;
}

// --- validation -------------------------------------------------------------

namespace {

int entity_rank(const std::string& entity) {
  if (entity == "schema") return 0;
  if (entity == "ego") return 1;
  if (entity == "tie") return 2;
  if (entity == "contact") return 3;
  return 4;
}

void sort_issues(std::vector<ValidationIssue>& issues) {
  std::stable_sort(issues.begin(), issues.end(), [](const auto& a, const auto& b) {
    auto ra = entity_rank(a.entity), rb = entity_rank(b.entity);
    if (ra != rb) return ra < rb;
    if (a.entity != b.entity) return a.entity < b.entity;
    if (a.id != b.id) return a.id < b.id;
    return a.rule < b.rule;
  });
}

template <typename Record>
void check_records(const std::vector<Record>& records, Entity entity,
                   const AttributeSchema& schema, ValidationReport& report) {
  const std::string kind(to_string(entity));
  std::map<std::string, std::vector<std::size_t>> positions;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.id.empty())
      report.errors.push_back({kind, r.id, std::string(rules::kEmptyId),
                               kind + " at position " + std::to_string(i) + " has an empty id"});
    positions[r.id].push_back(i);

    for (const auto& def : schema.entries()) {
      if (def.entity != entity || !def.required) continue;
      if (!r.attributes.count(def.name))
        report.errors.push_back({kind, r.id, std::string(rules::kMissingRequired),
                                 "required attribute '" + def.name + "' is absent"});
    }
    for (const auto& [name, value] : r.attributes) {
      const auto* def = schema.find(entity, name);
      if (!def) {
        report.warnings.push_back({kind, r.id, std::string(rules::kUndeclaredAttribute),
                                   "attribute '" + name + "' is not declared in the schema"});
        continue;
      }
      if (kind_of(value) != def->kind) {
        report.errors.push_back({kind, r.id, std::string(rules::kKindMismatch),
                                 "attribute '" + name + "' should be " +
                                     std::string(to_string(def->kind)) + " but is " +
                                     std::string(to_string(kind_of(value)))});
      } else if (def->kind == AttributeKind::Ordinal &&
                 std::get<Ordinal>(value).scale().levels != def->scale->levels) {
        report.errors.push_back({kind, r.id, std::string(rules::kScaleMismatch),
                                 "attribute '" + name + "' uses a different ordinal scale"});
      }
    }
  }
  for (const auto& [id, pos] : positions) {
    if (pos.size() < 2) continue;
    std::string list;
    for (auto p : pos) list += (list.empty() ? "" : ", ") + std::to_string(p);
    report.errors.push_back({kind, id, std::string(rules::kDuplicateId),
                             "id '" + id + "' used at positions " + list});
  }
}

ErrorKind error_kind_for_rule(const std::string& rule) {
  if (rule == rules::kDanglingReference) return ErrorKind::DanglingReference;
  if (rule == rules::kDuplicateId) return ErrorKind::DuplicateId;
  return ErrorKind::SchemaViolation;
}

}  // namespace

ValidationReport validate_diary(const Diary& diary) {
  ValidationReport report;
  check_records(diary.egos, Entity::Ego, diary.schema, report);
  check_records(diary.ties, Entity::Tie, diary.schema, report);
  check_records(diary.contacts, Entity::Contact, diary.schema, report);

  std::set<std::string_view> ego_ids, tie_ids;
  for (const auto& e : diary.egos) ego_ids.insert(e.id);
  for (const auto& t : diary.ties) tie_ids.insert(t.id);
  for (const auto& t : diary.ties)
    if (!ego_ids.count(t.ego))
      report.errors.push_back({"tie", t.id, std::string(rules::kDanglingReference),
                               "tie references unknown ego '" + t.ego + "'"});
  for (const auto& c : diary.contacts)
    if (!tie_ids.count(c.tie))
      report.errors.push_back({"contact", c.id, std::string(rules::kDanglingReference),
                               "contact references unknown tie '" + c.tie + "'"});

  sort_issues(report.errors);
  sort_issues(report.warnings);
  return report;
}

void throw_if_invalid(const ValidationReport& report) {
  if (report.ok()) return;
  const auto& e = report.errors.front();
  throw Error(error_kind_for_rule(e.rule), e.entity + " '" + e.id + "': " + e.message);
}

// --- JSON -------------------------------------------------------------------

namespace {

json schema_to_json(const AttributeSchema& schema) {
  json out = json::array();
  for (const auto& def : schema.entries()) {
    json e = {{"name", def.name},
              {"kind", std::string(to_string(def.kind))},
              {"entity", std::string(to_string(def.entity))},
              {"required", def.required}};
    if (def.scale) e["scale"] = def.scale->levels;
    out.push_back(std::move(e));
  }
  return out;
}

AttributeSchema schema_from_json(const json& j) {
  if (!j.is_array()) throw Error(ErrorKind::MalformedInput, "schema must be an array");
  AttributeSchema schema;
  std::map<std::string, std::shared_ptr<const OrdinalScale>> scales;
  for (const auto& e : j) {
    if (!e.is_object() || !e.contains("name") || !e.contains("kind") || !e.contains("entity"))
      throw Error(ErrorKind::MalformedInput, "schema entry needs name, kind and entity");
    AttributeDef def;
    def.name = e.at("name").get<std::string>();
    auto kind = attribute_kind_from_string(e.at("kind").get<std::string>());
    auto entity = entity_from_string(e.at("entity").get<std::string>());
    if (!kind || !entity)
      throw Error(ErrorKind::MalformedInput, "schema entry '" + def.name + "' has bad kind/entity");
    def.kind = *kind;
    def.entity = *entity;
    def.required = e.value("required", false);
    if (def.kind == AttributeKind::Ordinal) {
      auto levels = e.value("scale", std::vector<std::string>{});
      // Attributes sharing a name share one scale (e.g. ego and tie "liking").
      auto& shared = scales[def.name];
      if (shared && shared->levels == levels) {
        def.scale = shared;
      } else {
        def.scale = std::make_shared<OrdinalScale>(OrdinalScale{def.name, levels});
        if (!shared) shared = def.scale;
      }
    }
    schema.add(std::move(def));
  }
  return schema;
}

AttributeMap attributes_from_json(const json& j, Entity entity, const AttributeSchema& schema,
                                  const std::string& where) {
  AttributeMap out;
  if (j.is_null()) return out;
  if (!j.is_object()) throw Error(ErrorKind::MalformedInput, where + ": attributes must be an object");
  for (const auto& [name, value] : j.items()) {
    auto v = detail::decode_attribute(value, schema.find(entity, name), where + "." + name);
    if (v) out.emplace(name, std::move(*v));
  }
  return out;
}

std::string required_string(const json& record, const char* key, const std::string& where) {
  if (!record.is_object() || !record.contains(key) || !record.at(key).is_string())
    throw Error(ErrorKind::MalformedInput, where + ": missing string field '" + key + "'");
  return record.at(key).get<std::string>();
}

const json& required_array(const json& doc, const char* key) {
  static const json empty = json::array();
  if (!doc.contains(key)) return empty;
  if (!doc.at(key).is_array())
    throw Error(ErrorKind::MalformedInput, std::string("'") + key + "' must be an array");
  return doc.at(key);
}

}  // namespace

AttributeSchema parse_schema_json(std::string_view bytes) {
  auto j = detail::parse_json_text(bytes, "schema");
  if (j.is_object() && j.contains("schema")) return schema_from_json(j.at("schema"));
  return schema_from_json(j);
}

std::string serialize_schema_json(const AttributeSchema& schema) {
  return schema_to_json(schema).dump(2) + "\n";
}

Diary parse_diary_json(std::string_view bytes, bool check) {
  auto doc = detail::parse_json_text(bytes, "diary");
  if (!doc.is_object()) throw Error(ErrorKind::MalformedInput, "diary: top level must be an object");

  Diary diary;
  diary.schema = doc.contains("schema") ? schema_from_json(doc.at("schema")) : canonical_schema();

  const auto& egos = required_array(doc, "egos");
  for (std::size_t i = 0; i < egos.size(); ++i) {
    std::string where = "egos[" + std::to_string(i) + "]";
    Ego e;
    e.id = required_string(egos[i], "id", where);
    e.attributes = attributes_from_json(egos[i].value("attributes", json()), Entity::Ego,
                                        diary.schema, where);
    diary.egos.push_back(std::move(e));
  }
  const auto& ties = required_array(doc, "ties");
  for (std::size_t i = 0; i < ties.size(); ++i) {
    std::string where = "ties[" + std::to_string(i) + "]";
    Tie t;
    t.id = required_string(ties[i], "id", where);
    t.ego = required_string(ties[i], "ego_id", where);
    t.attributes = attributes_from_json(ties[i].value("attributes", json()), Entity::Tie,
                                        diary.schema, where);
    diary.ties.push_back(std::move(t));
  }
  const auto& contacts = required_array(doc, "contacts");
  for (std::size_t i = 0; i < contacts.size(); ++i) {
    std::string where = "contacts[" + std::to_string(i) + "]";
    Contact c;
    c.id = required_string(contacts[i], "id", where);
    c.tie = required_string(contacts[i], "tie_id", where);
    c.attributes = attributes_from_json(contacts[i].value("attributes", json()), Entity::Contact,
                                        diary.schema, where);
    diary.contacts.push_back(std::move(c));
  }
  if (check) throw_if_invalid(validate_diary(diary));
  return diary;
}

std::string serialize_diary_json(const Diary& diary) {
  json doc;
  doc["schema"] = schema_to_json(diary.schema);
  doc["egos"] = json::array();
  for (const auto& e : diary.egos)
    doc["egos"].push_back({{"id", e.id}, {"attributes", detail::attributes_to_json(e.attributes)}});
  doc["ties"] = json::array();
  for (const auto& t : diary.ties)
    doc["ties"].push_back({{"id", t.id},
                           {"ego_id", t.ego},
                           {"attributes", detail::attributes_to_json(t.attributes)}});
  doc["contacts"] = json::array();
  for (const auto& c : diary.contacts)
    doc["contacts"].push_back({{"id", c.id},
                               {"tie_id", c.tie},
                               {"attributes", detail::attributes_to_json(c.attributes)}});
  return doc.dump(2) + "\n";
}

// --- CSV --------------------------------------------------------------------

namespace {

struct TableSpec {
  std::string name;
  Entity entity;
  std::vector<std::string> key_columns;  // leading columns that are not attributes
};

template <typename Fn>
void read_table(std::string_view bytes, const TableSpec& spec, const AttributeSchema& schema,
                Fn&& emit) {
  auto rows = detail::parse_csv(bytes, spec.name);
  if (rows.empty())
    throw Error(ErrorKind::MalformedInput, spec.name + ": missing header row");
  const auto& header = rows.front();
  if (header.size() < spec.key_columns.size())
    throw Error(ErrorKind::MalformedInput, spec.name + ": header too short");
  for (std::size_t k = 0; k < spec.key_columns.size(); ++k)
    if (header[k] != spec.key_columns[k])
      throw Error(ErrorKind::MalformedInput, spec.name + ": column " + std::to_string(k + 1) +
                                                 " must be '" + spec.key_columns[k] + "'");
  std::vector<const AttributeDef*> defs;
  for (std::size_t c = spec.key_columns.size(); c < header.size(); ++c) {
    const auto* def = schema.find(spec.entity, header[c]);
    if (!def)
      throw Error(ErrorKind::SchemaViolation,
                  spec.name + ": column '" + header[c] + "' is not declared in the schema");
    defs.push_back(def);
  }
  std::set<std::string> seen;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != header.size())
      throw Error(ErrorKind::MalformedInput, spec.name + ": row " + std::to_string(r + 1) +
                                                 " has " + std::to_string(row.size()) +
                                                 " fields, expected " +
                                                 std::to_string(header.size()));
    if (!seen.insert(row[0]).second)
      throw Error(ErrorKind::DuplicateId,
                  spec.name + ": row " + std::to_string(r + 1) + " repeats id '" + row[0] + "'");
    AttributeMap attrs;
    for (std::size_t c = 0; c < defs.size(); ++c) {
      std::size_t col = c + spec.key_columns.size();
      std::string where = spec.name + " row " + std::to_string(r + 1) + " column '" +
                          header[col] + "'";
      if (auto v = detail::decode_cell(row[col], *defs[c], where))
        attrs.emplace(header[col], std::move(*v));
    }
    emit(row, std::move(attrs));
  }
}

Diary parse_csv_impl(std::string_view tie_bytes, std::string_view contact_bytes,
                     std::optional<std::string_view> ego_bytes, const AttributeSchema& schema,
                     bool check) {
  Diary diary;
  diary.schema = schema;
  if (ego_bytes) {
    read_table(*ego_bytes, {"egos.csv", Entity::Ego, {"id"}}, schema,
               [&](const auto& row, AttributeMap attrs) {
                 diary.egos.push_back({row[0], std::move(attrs)});
               });
  }
  std::set<std::string> known_egos;
  for (const auto& e : diary.egos) known_egos.insert(e.id);
  read_table(tie_bytes, {"ties.csv", Entity::Tie, {"id", "ego_id"}}, schema,
             [&](const auto& row, AttributeMap attrs) {
               if (!ego_bytes && known_egos.insert(row[1]).second)
                 diary.egos.push_back({row[1], {}});
               diary.ties.push_back({row[0], row[1], std::move(attrs)});
             });
  read_table(contact_bytes, {"contacts.csv", Entity::Contact, {"id", "tie_id"}}, schema,
             [&](const auto& row, AttributeMap attrs) {
               diary.contacts.push_back({row[0], row[1], std::move(attrs)});
             });
  if (check) throw_if_invalid(validate_diary(diary));
  return diary;
}

template <typename Record>
std::string write_table(const std::vector<Record>& records, Entity entity,
                        const AttributeSchema& schema, std::vector<std::string> key_columns,
                        std::string (*key_of)(const Record&)) {
  std::vector<std::string> attrs;
  for (const auto& def : schema.entries())
    if (def.entity == entity) attrs.push_back(def.name);
  std::vector<std::vector<std::string>> rows;
  auto header = key_columns;
  header.insert(header.end(), attrs.begin(), attrs.end());
  rows.push_back(header);
  for (const auto& r : records) {
    std::vector<std::string> row{r.id};
    if (key_of) row.push_back(key_of(r));
    for (const auto& name : attrs) {
      auto it = r.attributes.find(name);
      row.push_back(it == r.attributes.end() ? "" : detail::cell_text(it->second));
    }
    rows.push_back(std::move(row));
  }
  return detail::write_csv(rows);
}

}  // namespace

Diary parse_diary_csv(std::string_view tie_bytes, std::string_view contact_bytes,
                      const AttributeSchema& schema, bool check) {
  return parse_csv_impl(tie_bytes, contact_bytes, std::nullopt, schema, check);
}

Diary parse_diary_csv(std::string_view tie_bytes, std::string_view contact_bytes,
                      std::string_view ego_bytes, const AttributeSchema& schema, bool check) {
  return parse_csv_impl(tie_bytes, contact_bytes, ego_bytes, schema, check);
}

CsvTables serialize_diary_csv(const Diary& diary) {
  CsvTables out;
  out.egos = write_table<Ego>(diary.egos, Entity::Ego, diary.schema, {"id"}, nullptr);
  out.ties = write_table<Tie>(diary.ties, Entity::Tie, diary.schema, {"id", "ego_id"},
                              [](const Tie& t) { return t.ego; });
  out.contacts = write_table<Contact>(diary.contacts, Entity::Contact, diary.schema,
                                      {"id", "tie_id"}, [](const Contact& c) { return c.tie; });
  return out;
}

// --- stats ------------------------------------------------------------------

StatsSummary diary_stats(const Diary& diary) {
  StatsSummary out;
  out.egos = diary.egos.size();
  out.ties = diary.ties.size();
  out.contacts = diary.contacts.size();

  std::unordered_map<std::string_view, std::size_t> per_tie;
  for (const auto& c : diary.contacts) ++per_tie[c.tie];

  for (const auto& ego : diary.egos) {
    EgoStats s;
    s.ego = ego.id;
    std::vector<std::size_t> counts;
    for (const auto& t : diary.ties) {
      if (t.ego != ego.id) continue;
      auto it = per_tie.find(t.id);
      counts.push_back(it == per_tie.end() ? 0 : it->second);
    }
    s.ties = counts.size();
    for (auto c : counts) s.contacts += c;
    if (!counts.empty()) {
      std::sort(counts.begin(), counts.end());
      s.contacts_per_tie_min = counts.front();
      s.contacts_per_tie_max = counts.back();
      auto n = counts.size();
      s.contacts_per_tie_median =
          n % 2 ? double(counts[n / 2]) : (double(counts[n / 2 - 1]) + double(counts[n / 2])) / 2.0;
    }
    out.per_ego.push_back(std::move(s));
  }
  return out;
}

std::string stats_to_json(const StatsSummary& stats) {
  json j;
  j["totals"] = {{"egos", stats.egos}, {"ties", stats.ties}, {"contacts", stats.contacts}};
  j["egos"] = json::array();
  for (const auto& s : stats.per_ego)
    j["egos"].push_back({{"ego", s.ego},
                         {"ties", s.ties},
                         {"contacts", s.contacts},
                         {"contacts_per_tie",
                          {{"min", s.contacts_per_tie_min},
                           {"median", s.contacts_per_tie_median},
                           {"max", s.contacts_per_tie_max}}}});
  return j.dump(2) + "\n";
}

std::string report_to_json(const ValidationReport& report) {
  auto list = [](const std::vector<ValidationIssue>& issues) {
    json a = json::array();
    for (const auto& i : issues)
      a.push_back({{"entity", i.entity}, {"id", i.id}, {"rule", i.rule}, {"message", i.message}});
    return a;
  };
  json j{{"ok", report.ok()}, {"errors", list(report.errors)}, {"warnings", list(report.warnings)}};
  return j.dump(2) + "\n";
}

}  // namespace contacttrees
