#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "contacttrees/attribute.hpp"

namespace contacttrees {

/// The diary keeper.
struct Ego {
  std::string id;
  AttributeMap attributes;

  bool operator==(const Ego&) const = default;
};

/// A person the ego is connected to. Drawn as one small branch.
struct Tie {
  std::string id;
  std::string ego;
  AttributeMap attributes;

  bool operator==(const Tie&) const = default;
};

/// One interaction between the ego and a tie. Drawn as one leaf.
struct Contact {
  std::string id;
  std::string tie;
  AttributeMap attributes;

  bool operator==(const Contact&) const = default;
};

struct Diary {
  AttributeSchema schema;
  std::vector<Ego> egos;
  std::vector<Tie> ties;
  std::vector<Contact> contacts;

  const Ego* find_ego(std::string_view id) const;
  const Tie* find_tie(std::string_view id) const;

  bool operator==(const Diary&) const = default;
};

struct ValidationIssue {
  std::string entity;  // "schema", "ego", "tie", "contact", or a mapping channel
  std::string id;
  std::string rule;
  std::string message;

  bool operator==(const ValidationIssue&) const = default;
};

struct ValidationReport {
  std::vector<ValidationIssue> errors;
  std::vector<ValidationIssue> warnings;

  bool ok() const { return errors.empty(); }
};

namespace rules {
inline constexpr std::string_view kDanglingReference = "dangling-reference";
inline constexpr std::string_view kDuplicateId = "duplicate-id";
inline constexpr std::string_view kMissingRequired = "missing-required";
inline constexpr std::string_view kKindMismatch = "kind-mismatch";
inline constexpr std::string_view kScaleMismatch = "scale-mismatch";
inline constexpr std::string_view kEmptyId = "empty-id";
inline constexpr std::string_view kUndeclaredAttribute = "undeclared-attribute";
}  // namespace rules

/// Checks every structural invariant of a diary. Errors are ordered by
/// (entity kind, id, rule). Undeclared attributes are reported as warnings.
ValidationReport validate_diary(const Diary& diary);

/// Throws the first error of a report as an Error of the matching kind.
void throw_if_invalid(const ValidationReport& report);

// JSON: {"schema": [...], "egos": [...], "ties": [...], "contacts": [...]}.
// Parsers run validate_diary and throw on the first error unless `check` is false.
Diary parse_diary_json(std::string_view bytes, bool check = true);
std::string serialize_diary_json(const Diary& diary);

/// Parses the two-table CSV form; egos are derived from the ego_id column.
Diary parse_diary_csv(std::string_view tie_bytes, std::string_view contact_bytes,
                      const AttributeSchema& schema, bool check = true);
/// Same, with an optional third table `id,<attr...>` carrying ego attributes.
Diary parse_diary_csv(std::string_view tie_bytes, std::string_view contact_bytes,
                      std::string_view ego_bytes, const AttributeSchema& schema, bool check = true);

struct CsvTables {
  std::string ties;
  std::string contacts;
  std::string egos;
};
CsvTables serialize_diary_csv(const Diary& diary);

// Schema serialization, shared by the JSON diary and standalone schema files.
AttributeSchema parse_schema_json(std::string_view bytes);
std::string serialize_schema_json(const AttributeSchema& schema);

struct EgoStats {
  std::string ego;
  std::size_t ties = 0;
  std::size_t contacts = 0;
  std::size_t contacts_per_tie_min = 0;
  double contacts_per_tie_median = 0.0;
  std::size_t contacts_per_tie_max = 0;
};

struct StatsSummary {
  std::vector<EgoStats> per_ego;
  std::size_t egos = 0;
  std::size_t ties = 0;
  std::size_t contacts = 0;
};

StatsSummary diary_stats(const Diary& diary);
std::string stats_to_json(const StatsSummary& stats);
std::string report_to_json(const ValidationReport& report);

}  // namespace contacttrees
