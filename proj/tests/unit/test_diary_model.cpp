#include <doctest.h>

#include <algorithm>
#include <set>

#include "contacttrees/diary.hpp"
#include "contacttrees/error.hpp"
#include "contacttrees/synth.hpp"
#include "support.hpp"

using namespace contacttrees;
using testing::fixture_path;
using testing::slurp;

namespace {

ErrorKind kind_of_failure(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::MalformedInput;
}

std::string minimal_json(const std::string& ties, const std::string& contacts) {
  return R"({"egos":[{"id":"E1","attributes":{}}],"ties":)" + ties + R"(,"contacts":)" +
         contacts + "}";
}

}  // namespace

TEST_CASE("dates parse strictly and order chronologically") {
  auto d = Date::parse("2004-02-29");
  REQUIRE(d);
  CHECK(d->iso() == "2004-02-29");
  CHECK_FALSE(Date::parse("2005-02-29"));
  CHECK_FALSE(Date::parse("2004-13-01"));
  CHECK_FALSE(Date::parse("2004-1-01"));
  CHECK_FALSE(Date::parse("yesterday"));
  CHECK(Date::from_ymd(2004, 1, 5) < Date::from_ymd(2004, 2, 2));
  CHECK(Date::from_ymd(1970, 1, 2).days_since_epoch() == 1);
}

TEST_CASE("attribute display and numeric readings") {
  auto schema = canonical_schema();
  const auto* liking = schema.find(Entity::Tie, "liking");
  REQUIRE(liking);
  Ordinal very(3, liking->scale);
  CHECK(display(AttributeValue{very}) == "very much");
  CHECK(numeric_value(AttributeValue{very}) == 3.0);
  CHECK(display(AttributeValue{2.5}) == "2.5");
  CHECK(display(AttributeValue{std::int64_t{25}}) == "25");
  CHECK(display(AttributeValue{true}) == "true");
  CHECK_FALSE(numeric_value(AttributeValue{std::string("x")}));
  CHECK(kind_of(AttributeValue{Date::from_ymd(2004, 1, 1)}) == AttributeKind::Date);
  CHECK_THROWS_AS(Ordinal(4, liking->scale), Error);
}

TEST_CASE("schema names are unique per entity") {
  AttributeSchema s;
  s.add({"age", AttributeKind::Integer, Entity::Tie, nullptr, false});
  s.add({"age", AttributeKind::Integer, Entity::Ego, nullptr, false});
  CHECK(kind_of_failure([&] { s.add({"age", AttributeKind::Real, Entity::Tie, nullptr, false}); }) ==
        ErrorKind::SchemaViolation);
  CHECK(kind_of_failure([&] { s.add({"mood", AttributeKind::Ordinal, Entity::Tie, nullptr, false}); }) ==
        ErrorKind::SchemaViolation);
  CHECK(parse_schema_json(serialize_schema_json(canonical_schema())) == canonical_schema());
}

TEST_CASE("fixture loads with the expected shape") {
  const Diary d = testing::small_diary();
  CHECK(d.egos.size() == 3);
  CHECK(d.ties.size() == 12);
  CHECK(d.contacts.size() == 40);
  const Ego* e1 = d.find_ego("E1");
  REQUIRE(e1);
  CHECK(display(e1->attributes.at("gender")) == "female");
  CHECK(d.find_tie("T4")->ego == "E1");
  CHECK(d.find_tie("T99") == nullptr);
  CHECK(validate_diary(d).ok());
}

TEST_CASE("diary JSON round-trips") {
  const Diary d = testing::small_diary();
  const auto text = serialize_diary_json(d);
  CHECK(parse_diary_json(text) == d);
  CHECK(serialize_diary_json(parse_diary_json(text)) == text);
}

TEST_CASE("CSV and JSON forms describe the same diary") {
  const Diary from_json = testing::small_diary();
  const auto dir = fixture_path("diary_small_csv");
  const Diary from_csv = parse_diary_csv(slurp(dir + "/ties.csv"), slurp(dir + "/contacts.csv"),
                                         slurp(dir + "/egos.csv"), canonical_schema());
  CHECK(from_csv == from_json);

  const auto tables = serialize_diary_csv(from_json);
  CHECK(parse_diary_csv(tables.ties, tables.contacts, tables.egos, canonical_schema()) == from_json);

  // Without egos.csv the egos are derived, in order of first appearance.
  const Diary derived =
      parse_diary_csv(slurp(dir + "/ties.csv"), slurp(dir + "/contacts.csv"), canonical_schema());
  REQUIRE(derived.egos.size() == 3);
  CHECK(derived.egos[0].id == "E1");
  CHECK(derived.egos[2].id == "E3");
  CHECK(derived.egos[0].attributes.empty());
}

TEST_CASE("CSV quoting, CRLF and BOM") {
  const std::string ties =
      "\xEF\xBB\xBFid,ego_id,gender,liking\r\n"
      "T1,E1,\"male\",\"very much\"\r\n"
      "\"T,2\",E1,female,somewhat\r\n";
  const std::string contacts = "id,tie_id,date\nC1,T1,2004-01-01\nC2,\"T,2\",2004-01-02\n";
  const Diary d = parse_diary_csv(ties, contacts, canonical_schema());
  REQUIRE(d.ties.size() == 2);
  CHECK(d.ties[1].id == "T,2");
  CHECK(display(d.ties[0].attributes.at("liking")) == "very much");
  CHECK(d.contacts[1].tie == "T,2");
}

TEST_CASE("CSV rejects unknown columns and duplicate ids") {
  CHECK(kind_of_failure([] {
          parse_diary_csv("id,ego_id,shoe_size\nT1,E1,42\n", "id,tie_id,date\n", canonical_schema());
        }) == ErrorKind::SchemaViolation);
  try {
    parse_diary_csv("id,ego_id\nT1,E1\nT1,E1\n", "id,tie_id,date\n", canonical_schema());
    FAIL("duplicate accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DuplicateId);
    CHECK(std::string(e.what()).find("T1") != std::string::npos);
  }
  CHECK(kind_of_failure([] {
          parse_diary_csv("id,ego_id\nT1,E1\n", "id,tie_id,date\nC1,T1,\"2004-01-01\n",
                          canonical_schema());
        }) == ErrorKind::MalformedInput);
}

TEST_CASE("validation reports each structural rule") {
  SUBCASE("dangling tie reference") {
    auto text = minimal_json(R"([{"id":"T1","ego_id":"E1"}])",
                             R"([{"id":"C1","tie_id":"T9","attributes":{"date":"2004-01-01"}}])");
    CHECK(kind_of_failure([&] { parse_diary_json(text); }) == ErrorKind::DanglingReference);
    auto report = validate_diary(parse_diary_json(text, false));
    REQUIRE(report.errors.size() == 1);
    CHECK(report.errors[0].rule == rules::kDanglingReference);
    CHECK(report.errors[0].id == "C1");
  }
  SUBCASE("duplicate ids name every position") {
    auto text = minimal_json(R"([{"id":"T1","ego_id":"E1"},{"id":"T1","ego_id":"E1"}])", "[]");
    auto report = validate_diary(parse_diary_json(text, false));
    REQUIRE_FALSE(report.ok());
    CHECK(report.errors[0].rule == rules::kDuplicateId);
    CHECK(report.errors[0].message.find("0") != std::string::npos);
    CHECK(report.errors[0].message.find("1") != std::string::npos);
  }
  SUBCASE("missing required date") {
    auto text = minimal_json(R"([{"id":"T1","ego_id":"E1"}])", R"([{"id":"C1","tie_id":"T1"}])");
    auto report = validate_diary(parse_diary_json(text, false));
    REQUIRE_FALSE(report.ok());
    CHECK(report.errors[0].rule == rules::kMissingRequired);
  }
  SUBCASE("kind mismatch is rejected while parsing") {
    auto text = minimal_json(R"([{"id":"T1","ego_id":"E1","attributes":{"age":"old"}}])", "[]");
    CHECK(kind_of_failure([&] { parse_diary_json(text); }) == ErrorKind::SchemaViolation);
  }
  SUBCASE("undeclared attributes only warn") {
    auto text = minimal_json(R"([{"id":"T1","ego_id":"E1","attributes":{"nickname":"Bo"}}])", "[]");
    auto report = validate_diary(parse_diary_json(text));
    CHECK(report.ok());
    REQUIRE(report.warnings.size() == 1);
    CHECK(report.warnings[0].rule == rules::kUndeclaredAttribute);
  }
  SUBCASE("malformed JSON reports a byte position") {
    try {
      parse_diary_json("{\"egos\": [");
      FAIL("accepted");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::MalformedInput);
      CHECK(std::string(e.what()).find("byte") != std::string::npos);
    }
  }
}

TEST_CASE("statistics of the fixture") {
  const auto stats = diary_stats(testing::small_diary());
  CHECK(stats.egos == 3);
  CHECK(stats.ties == 12);
  CHECK(stats.contacts == 40);
  const auto& e1 = stats.per_ego.at(0);
  CHECK(e1.ego == "E1");
  CHECK(e1.ties == 4);
  CHECK(e1.contacts == 11);
  CHECK(e1.contacts_per_tie_min == 2);
  CHECK(e1.contacts_per_tie_median == doctest::Approx(2.5));
  CHECK(e1.contacts_per_tie_max == 4);
}

TEST_CASE("synthetic diaries are deterministic and valid") {
  SynthProfile p;
  p.egos = 3;
  const Diary a = generate_synthetic_diary(42, p);
  const Diary b = generate_synthetic_diary(42, p);
  const Diary c = generate_synthetic_diary(43, p);
  CHECK(a == b);
  CHECK_FALSE(a == c);
  CHECK(a.egos.size() == 3);
  CHECK(validate_diary(a).ok());
  for (const auto& t : a.ties) {
    const bool stranger = std::get<bool>(t.attributes.at("is_stranger"));
    if (stranger) CHECK(std::get<double>(t.attributes.at("years_known")) == 0.0);
  }
  // Serialized output reparses to the same diary.
  CHECK(parse_diary_json(serialize_diary_json(a)) == a);
}

TEST_CASE("stress profile reaches the published scale") {
  const Diary d = generate_synthetic_diary(7, stress_profile());
  CHECK(d.egos.size() == 1);
  CHECK(d.ties.size() == 819);
  CHECK(d.contacts.size() == 4091);
  std::set<std::string> with_contacts;
  for (const auto& c : d.contacts) with_contacts.insert(c.tie);
  CHECK(with_contacts.size() == 819);
}

TEST_CASE("synth profiles round-trip and reject nonsense") {
  SynthProfile p;
  p.egos = 2;
  p.ties_per_ego = CountDistribution::fixed(9);
  p.contacts_total = 30;
  const auto again = parse_synth_profile(serialize_synth_profile(p));
  CHECK(serialize_synth_profile(again) == serialize_synth_profile(p));
  const Diary d = generate_synthetic_diary(1, again);
  CHECK(d.ties.size() == 18);
  CHECK(d.contacts.size() == 30);

  CHECK(parse_synth_profile(R"({"preset":"stress"})").contacts_total == 4091);
  SynthProfile bad;
  bad.egos = -1;
  CHECK(kind_of_failure([&] { generate_synthetic_diary(1, bad); }) == ErrorKind::InvalidProfile);
  SynthProfile sparse;
  sparse.ties_per_ego = CountDistribution::fixed(10);
  sparse.contacts_total = 5;
  CHECK(generate_synthetic_diary(1, sparse).contacts.size() == 5);
  SynthProfile inverted;
  inverted.ties_per_ego = CountDistribution::uniform(9, 3);
  CHECK(kind_of_failure([&] { generate_synthetic_diary(1, inverted); }) == ErrorKind::InvalidProfile);
}
