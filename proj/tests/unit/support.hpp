#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>

#include "contacttrees/diary.hpp"
#include "contacttrees/mapping.hpp"

namespace testing {

inline std::string fixture_path(const std::string& name) {
  return std::string(CONTACTTREES_FIXTURES) + "/" + name;
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline contacttrees::Diary small_diary() {
  return contacttrees::parse_diary_json(slurp(fixture_path("diary_small.json")));
}

inline contacttrees::TieChannelValues tie_values(std::string id, contacttrees::Side side,
                                                 std::size_t band,
                                                 contacttrees::BranchSide branch,
                                                 int fruits = 0) {
  return {std::move(id), side, band, branch, fruits};
}

inline const contacttrees::AttributeSchema& schema() {
  static const auto s = contacttrees::canonical_schema();
  return s;
}

inline contacttrees::AttributeValue level(contacttrees::Entity entity, const std::string& name,
                                          const std::string& label) {
  const auto* def = schema().find(entity, name);
  return contacttrees::Ordinal(*def->scale->index_of(label), def->scale);
}

/// Tie with canonical attributes; empty strings and negative numbers leave
/// the attribute out.
inline contacttrees::Tie make_tie(std::string id, std::string gender, std::int64_t age,
                                  double years_known, std::string liking,
                                  bool stranger = false) {
  using namespace contacttrees;
  Tie t{std::move(id), "E1", {}};
  if (!gender.empty()) t.attributes["gender"] = gender;
  if (age >= 0) t.attributes["age"] = age;
  if (years_known >= 0) t.attributes["years_known"] = years_known;
  if (!liking.empty()) t.attributes["liking"] = level(Entity::Tie, "liking", liking);
  t.attributes["is_stranger"] = stranger;
  return t;
}

inline contacttrees::Contact make_contact(std::string id, std::string tie, std::string date,
                                          double duration, std::string feeling) {
  using namespace contacttrees;
  Contact c{std::move(id), std::move(tie), {}};
  c.attributes["date"] = *Date::parse(date);
  if (duration >= 0) c.attributes["duration"] = duration;
  if (!feeling.empty()) c.attributes["feeling"] = level(Entity::Contact, "feeling", feeling);
  return c;
}

}  // namespace testing
