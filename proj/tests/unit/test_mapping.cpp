#include <doctest.h>

#include <random>

#include "contacttrees/error.hpp"
#include "contacttrees/mapping.hpp"
#include "support.hpp"

using namespace contacttrees;
using testing::make_contact;
using testing::make_tie;

namespace {

bool has_rule(const ValidationReport& r, std::string_view channel, std::string_view rule) {
  for (const auto& e : r.errors)
    if (e.id == channel && e.rule == rule) return true;
  return false;
}

}  // namespace

TEST_CASE("presets validate against the canonical schema") {
  for (const auto& name : preset_names()) {
    CAPTURE(name);
    auto spec = preset_mapping(name);
    CHECK(spec.name == name);
    CHECK(validate_mapping(spec, canonical_schema()).ok());
    CHECK(serialize_mapping_json(parse_mapping_json(serialize_mapping_json(spec))) ==
          serialize_mapping_json(spec));
  }
  CHECK_THROWS_AS(preset_mapping("oak"), Error);
}

TEST_CASE("decade bins clamp to the configured range") {
  const auto spec = preset_mapping(kPresetDiaryDefault).trunk_position;
  CHECK(bin_value(spec, AttributeValue{std::int64_t{0}}) == 0);
  CHECK(bin_value(spec, AttributeValue{std::int64_t{9}}) == 0);
  CHECK(bin_value(spec, AttributeValue{std::int64_t{10}}) == 1);
  CHECK(bin_value(spec, AttributeValue{std::int64_t{25}}) == 2);
  CHECK(bin_value(spec, AttributeValue{std::int64_t{99}}) == 9);
  CHECK(bin_value(spec, AttributeValue{std::int64_t{104}}) == 9);
  CHECK(bin_value(spec, AttributeValue{std::int64_t{-3}}) == 0);
  CHECK(bin_value(spec, AttributeValue{29.99}) == 2);
  CHECK_THROWS_AS(bin_value(spec, AttributeValue{std::string("old")}), Error);
}

TEST_CASE("threshold bins count the edges at or below the value") {
  const auto spec = preset_mapping(kPresetLikingTenure).trunk_position;
  CHECK(bin_value(spec, AttributeValue{0.0}) == 1);
  CHECK(bin_value(spec, AttributeValue{0.99}) == 1);
  CHECK(bin_value(spec, AttributeValue{1.0}) == 2);
  CHECK(bin_value(spec, AttributeValue{4.5}) == 2);
  CHECK(bin_value(spec, AttributeValue{5.0}) == 3);
  CHECK(bin_value(spec, AttributeValue{19.9}) == 3);
  CHECK(bin_value(spec, AttributeValue{20.0}) == 4);
  CHECK(bin_value(spec, AttributeValue{-1.0}) == 0);

  AttributeMap stranger{{"is_stranger", true}, {"years_known", 0.0}};
  CHECK(resolve_band(spec, stranger, "T") == 0);
  AttributeMap unknown{{"is_stranger", false}};
  CHECK(resolve_band(spec, unknown, "T") == 0);
}

TEST_CASE("binning is monotone in its source") {
  for (const auto& name : preset_names()) {
    const auto spec = preset_mapping(name).trunk_position;
    std::size_t previous = 0;
    for (double x = -5; x <= 120; x += 0.25) {
      const auto band = bin_value(spec, AttributeValue{x});
      CHECK(band >= previous);
      CHECK(band < spec.band_count());
      previous = band;
    }
  }
}

TEST_CASE("tie channels under diary-default") {
  const auto spec = preset_mapping(kPresetDiaryDefault);
  auto v = resolve_tie_channels(spec, make_tie("T1", "male", 23, 8, "very much"));
  CHECK(v.side == Side::Left);
  CHECK(v.band == 2);
  CHECK(v.branch_side == BranchSide::Above);
  CHECK(v.fruit_count == 2);

  v = resolve_tie_channels(spec, make_tie("T2", "female", 52, 2.5, "somewhat"));
  CHECK(v.side == Side::Right);
  CHECK(v.band == 5);
  CHECK(v.branch_side == BranchSide::Below);
  CHECK(v.fruit_count == 1);

  // Exactly five years known sits above the main branch.
  CHECK(resolve_tie_channels(spec, make_tie("T3", "male", 40, 5, "not much")).branch_side ==
        BranchSide::Above);

  try {
    resolve_tie_channels(spec, make_tie("T4", "", 30, 1, "somewhat"));
    FAIL("accepted a tie without gender");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MissingAttribute);
  }
  try {
    resolve_tie_channels(spec, make_tie("T5", "unknown", 30, 1, "somewhat"));
    FAIL("accepted a gender outside the mapping");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnmappedValue);
  }
}

TEST_CASE("tie channels under liking-tenure") {
  const auto spec = preset_mapping(kPresetLikingTenure);
  auto v = resolve_tie_channels(spec, make_tie("T1", "female", 30, 3, "very much"));
  CHECK(v.side == Side::Right);
  CHECK(v.band == 2);
  CHECK(v.branch_side == BranchSide::Below);
  CHECK(v.fruit_count == 2);

  v = resolve_tie_channels(spec, make_tie("T2", "male", 41, 25, "somewhat"));
  CHECK(v.side == Side::Left);
  CHECK(v.band == 4);
  CHECK(v.branch_side == BranchSide::Above);
  CHECK(v.fruit_count == 1);

  CHECK_THROWS_AS(resolve_tie_channels(spec, make_tie("T3", "male", 41, 25, "not much")), Error);
}

TEST_CASE("leaf channels normalize size and darkness") {
  const auto spec = preset_mapping(kPresetDiaryDefault);
  const auto a = make_contact("C1", "T1", "2004-01-05", 10, "much worse");
  const auto b = make_contact("C2", "T1", "2004-01-06", 30, "much better");
  const auto c = make_contact("C3", "T1", "2004-01-07", 20, "same");
  const Contact* all[] = {&a, &b, &c};
  const auto norms = compute_leaf_norms(spec, all);
  CHECK(norms.size_min == 10);
  CHECK(norms.size_max == 30);

  auto la = resolve_contact_channels(spec, a, norms);
  auto lb = resolve_contact_channels(spec, b, norms);
  auto lc = resolve_contact_channels(spec, c, norms);
  CHECK(la.size == 0.0);
  CHECK(lb.size == 1.0);
  CHECK(lc.size == doctest::Approx(0.5));
  CHECK(la.darkness == 0.0);
  CHECK(lb.darkness == 1.0);
  CHECK(lc.darkness == doctest::Approx(0.5));
  CHECK(la.order_key < lb.order_key);
  CHECK(la.side == LeafSide::Alternate);

  // A single contact, or equal durations, gives the middle size.
  const Contact* one[] = {&a};
  CHECK(resolve_contact_channels(spec, a, compute_leaf_norms(spec, one)).size == 0.5);

  auto inverted = spec;
  inverted.leaf_darkness.higher_is_darker = false;
  CHECK(resolve_contact_channels(inverted, b, norms).darkness == 0.0);

  auto fixed = spec;
  fixed.leaf_size.fixed_range = {0.0, 100.0};
  CHECK(resolve_contact_channels(fixed, c, norms).size == doctest::Approx(0.2));
}

TEST_CASE("leaf channels stay in range for arbitrary inputs") {
  const auto spec = preset_mapping(kPresetDiaryDefault);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> wide(-1e6, 1e6);
  for (int i = 0; i < 500; ++i) {
    LeafNorms norms{wide(rng), wide(rng), wide(rng), wide(rng)};
    auto c = make_contact("C", "T", "2004-02-02", wide(rng), "better");
    c.attributes["duration"] = wide(rng);
    const auto v = resolve_contact_channels(spec, c, norms);
    CHECK(v.size >= 0.0);
    CHECK(v.size <= 1.0);
    CHECK(v.darkness >= 0.0);
    CHECK(v.darkness <= 1.0);
  }
}

TEST_CASE("ego channels") {
  const auto spec = preset_mapping(kPresetDiaryDefault);
  Ego single{"E1", {{"gender", std::string("female")}, {"age", std::int64_t{25}},
                    {"marital_status", std::string("single")}}};
  auto v = resolve_ego_channels(spec, single);
  CHECK(v.side == Side::Right);
  CHECK(v.band == 2);
  CHECK(v.count == 1);

  Ego married{"E2", {{"gender", std::string("male")}, {"age", std::int64_t{33}},
                     {"marital_status", std::string("married")}}};
  v = resolve_ego_channels(spec, married);
  CHECK(v.side == Side::Left);
  CHECK(v.band == 3);
  CHECK(v.count == 2);

  CHECK_THROWS_AS(resolve_ego_channels(preset_mapping(kPresetLikingTenure), married), Error);
}

TEST_CASE("mapping validation names the failing channel") {
  const auto schema = canonical_schema();
  SUBCASE("missing source") {
    auto spec = preset_mapping(kPresetDiaryDefault);
    spec.leaf_size.source = "loudness";
    CHECK(has_rule(validate_mapping(spec, schema), "leaf_size", "missing-source"));
  }
  SUBCASE("incompatible kind") {
    auto spec = preset_mapping(kPresetDiaryDefault);
    spec.trunk_position.source = "gender";
    CHECK(has_rule(validate_mapping(spec, schema), "trunk_position", "incompatible-kind"));
  }
  SUBCASE("partial fruit table") {
    auto spec = preset_mapping(kPresetDiaryDefault);
    spec.fruit_count.table.erase("somewhat");
    auto report = validate_mapping(spec, schema);
    REQUIRE(has_rule(report, "fruit_count", "partial-fruit-table"));
    CHECK(report.errors[0].message.rfind("PartialFruitTable", 0) == 0);
  }
  SUBCASE("fruit counts above two") {
    auto spec = preset_mapping(kPresetDiaryDefault);
    spec.fruit_count.table["very much"] = 3;
    CHECK(has_rule(validate_mapping(spec, schema), "fruit_count", "fruit-out-of-range"));
  }
  SUBCASE("unknown ordinal level in a predicate") {
    auto spec = preset_mapping(kPresetLikingTenure);
    spec.trunk_side.when = Predicate::equals("liking", "adores");
    CHECK(has_rule(validate_mapping(spec, schema), "trunk_side", "unknown-level"));
  }
  SUBCASE("threshold labels must match edges") {
    auto spec = preset_mapping(kPresetLikingTenure);
    spec.trunk_position.band_labels.pop_back();
    CHECK(has_rule(validate_mapping(spec, schema), "trunk_position", "bad-binning"));
  }
}

TEST_CASE("mapping JSON rejects malformed specs") {
  CHECK_THROWS_AS(parse_mapping_json("{}"), Error);
  CHECK_THROWS_AS(parse_mapping_json("[1,2]"), Error);
  auto text = serialize_mapping_json(preset_mapping(kPresetDiaryDefault));
  auto pos = text.find("\"ge\"");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 4, "\"gte\"");
  try {
    parse_mapping_json(text);
    FAIL("accepted an unknown operator");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidMapping);
  }
}

TEST_CASE("predicate descriptions") {
  CHECK(Predicate::equals("gender", "male").describe() == "gender = male");
  CHECK(Predicate::compare("age", Predicate::Op::Greater, 40).describe() == "age > 40");
  CHECK(Predicate::compare("age", Predicate::Op::Greater, 40).describe(true) == "age \xE2\x89\xA4 40");
}
