#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "contacttrees/attribute.hpp"
#include "contacttrees/diary.hpp"

namespace contacttrees {

enum class Side { Left, Right };
/// Side of a main branch a small branch leaves from. Below orders first.
enum class BranchSide { Below, Above };
enum class LeafSide { Above, Below, Alternate };

std::string_view to_string(Side side);
std::string_view to_string(BranchSide side);
std::string_view to_string(LeafSide side);

/// A boolean test on one attribute.
struct Predicate {
  enum class Op { Equals, In, GreaterEqual, Greater, LessEqual, Less };

  std::string attribute;
  Op op = Op::Equals;
  std::vector<std::string> values;  // Equals / In, compared with display()
  double threshold = 0.0;           // ordering ops, compared with numeric_value()

  static Predicate equals(std::string attribute, std::string value);
  static Predicate any_of(std::string attribute, std::vector<std::string> values);
  static Predicate compare(std::string attribute, Op op, double threshold);

  bool test(const AttributeValue& value) const;
  bool is_ordering() const { return op != Op::Equals && op != Op::In; }
  std::string describe(bool negated = false) const;
};

struct BandOverride {
  Predicate when;
  std::size_t band = 0;
};

struct BinningSpec {
  enum class Kind { DecadeBins, ThresholdBins, OrdinalPassthrough };

  std::string source;
  Kind kind = Kind::DecadeBins;
  std::vector<double> edges;             // ThresholdBins only, strictly ascending
  std::vector<std::string> band_labels;  // bottom to top
  /// Checked in order before binning; the first match pins the band.
  std::vector<BandOverride> overrides;
  /// Band used when the source attribute is absent; otherwise absence is an error.
  std::optional<std::size_t> absent_band;

  std::size_t band_count() const { return band_labels.size(); }
};

struct SideRule {
  Predicate when;
  Side when_true = Side::Left;
  /// Ties failing this test are outside the mapping's domain and are excluded.
  std::optional<Predicate> admit;
  std::string true_label;
  std::string false_label;
};

struct BranchSideRule {
  Predicate above_when;
  std::string above_label;
  std::string below_label;
};

struct FruitRule {
  std::string source;
  std::map<std::string, int> table;  // display(value) -> 0..2
};

struct LeafSizeRule {
  std::string source;
  /// Absolute range shared across trees; per-tree min/max when unset.
  std::optional<std::pair<double, double>> fixed_range;
};

struct LeafDarknessRule {
  std::string source;
  bool higher_is_darker = true;
};

struct LeafSideRule {
  enum class Mode { Alternate, ByPredicate };
  Mode mode = Mode::Alternate;
  Predicate above_when;  // ByPredicate only
  std::string above_label;
  std::string below_label;
};

struct EgoGlyphRule {
  Predicate side_when;
  Side when_true = Side::Left;
  std::string band_source;  // binned with the trunk-position spec
  std::string count_source;
  std::vector<std::string> two_bird_values;
};

struct MappingSpec {
  std::string name;
  SideRule trunk_side;
  BinningSpec trunk_position;
  BranchSideRule branch_side;
  FruitRule fruit_count;
  std::string leaf_order;
  LeafSizeRule leaf_size;
  LeafDarknessRule leaf_darkness;
  LeafSideRule leaf_side;
  std::optional<EgoGlyphRule> ego_glyph;
};

struct TieChannelValues {
  std::string tie;
  Side side = Side::Left;
  std::size_t band = 0;
  BranchSide branch_side = BranchSide::Below;
  int fruit_count = 0;

  bool operator==(const TieChannelValues&) const = default;
};

struct LeafChannelValues {
  std::string contact;
  double order_key = 0.0;
  double size = 0.5;
  double darkness = 0.5;
  LeafSide side = LeafSide::Alternate;

  bool operator==(const LeafChannelValues&) const = default;
};

struct EgoChannelValues {
  Side side = Side::Left;
  std::size_t band = 0;
  int count = 1;
};

/// Min/max of the leaf size and darkness sources over one tree's contacts.
struct LeafNorms {
  double size_min = 0.0, size_max = 0.0;
  double darkness_min = 0.0, darkness_max = 0.0;
};

inline constexpr std::string_view kPresetDiaryDefault = "diary-default";
inline constexpr std::string_view kPresetLikingTenure = "liking-tenure";

std::vector<std::string> preset_names();
MappingSpec preset_mapping(std::string_view name);

ValidationReport validate_mapping(const MappingSpec& spec, const AttributeSchema& schema);

std::size_t bin_value(const BinningSpec& spec, const AttributeValue& value);

/// Band for a record's attributes, honouring overrides and absent_band.
std::size_t resolve_band(const BinningSpec& spec, const AttributeMap& attributes,
                         const std::string& record_id);

TieChannelValues resolve_tie_channels(const MappingSpec& spec, const Tie& tie);
LeafChannelValues resolve_contact_channels(const MappingSpec& spec, const Contact& contact,
                                           const LeafNorms& norms);
EgoChannelValues resolve_ego_channels(const MappingSpec& spec, const Ego& ego);

LeafNorms compute_leaf_norms(const MappingSpec& spec, std::span<const Contact* const> contacts);

MappingSpec parse_mapping_json(std::string_view bytes);
std::string serialize_mapping_json(const MappingSpec& spec);

}  // namespace contacttrees
