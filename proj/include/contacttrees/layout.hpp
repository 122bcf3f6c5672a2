#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "contacttrees/diary.hpp"
#include "contacttrees/geometry.hpp"
#include "contacttrees/mapping.hpp"
#include "contacttrees/scene.hpp"
#include "contacttrees/spline.hpp"

namespace contacttrees {

/// Geometric constants of the construction. Lengths are in scene units.
struct LayoutParams {
  double line_spacing = 2.0;
  double stroke_width = 2.4;
  double trunk_base_rise = 36.0;  // segment-1 height of band 0
  double band_height = 36.0;
  double main_branch_gap = 10.0;
  double seg2_base_length = 60.0;
  double seg2_shrink = 0.85;
  double branch_base_angle = 60.0;  // degrees from vertical
  double angle_sharpen = 8.0;       // degrees per band
  double angle_floor = 15.0;
  double seg3_step = 10.0;
  double seg4_length = 8.0;
  double seg4_angle = 35.0;
  double seg5_per_leaf = 6.0;
  double seg5_min = 10.0;
  double leaf_radius_min = 2.0;
  double leaf_radius_max = 6.0;
  double leaf_spacing = 6.0;
  double leaf_tilt = 45.0;  // degrees between a leaf's axis and its small branch
  double fruit_radius = 3.5;
  int spline_samples = 16;
  /// Extra samples are added so that consecutive samples lie at most this far
  /// apart. Zero uses exactly spline_samples.
  double spline_max_spacing = 4.0;
  double bird_size = 10.0;
  double bird_margin = 8.0;
  double legend_row_height = 14.0;
  double legend_padding = 8.0;
  double legend_min_width = 320.0;
  double legend_gap = 16.0;

  /// Throws InvalidParams when an invariant fails.
  void validate() const;

  double band_base_y(std::size_t band) const;
  double branch_angle(std::size_t band) const;
  double seg2_length(std::size_t band) const;
};

/// Fields absent from the JSON keep their defaults.
LayoutParams parse_layout_params(std::string_view json_bytes);
std::string serialize_layout_params(const LayoutParams& params);

struct OrderedTies {
  std::vector<TieChannelValues> sequence;  // base_index = position
};

/// Left ties by (band asc, below before above, id), then right ties by
/// (band desc, above before below, id).
OrderedTies order_ties(std::vector<TieChannelValues> resolved);

struct MainBranch {
  Side side = Side::Left;
  std::size_t band = 0;
  Vec2d trunk_point = Vec2d::Zero();  // segment-2 start of the outermost tie
  Vec2d anchor = Vec2d::Zero();       // shared segment-2 end
  Vec2d axis = Vec2d::Zero();         // unit direction of segment 3
  double seg2_length = 0.0;
  double seg2_angle = 0.0;  // degrees from vertical
  std::size_t ties = 0;
};

struct TieSkeleton {
  TieChannelValues channels;
  std::size_t base_index = 0;
  std::size_t rank = 0;  // position along the main branch, 0 nearest the trunk
  std::size_t leaf_count = 0;
  Points2d points;       // 6 x 2, five segments
};

struct Skeleton {
  std::vector<TieSkeleton> ties;  // by base_index
  std::vector<MainBranch> branches;
  std::size_t band_count = 0;

  const MainBranch* branch(Side side, std::size_t band) const;
};

/// `leaf_counts[i]` belongs to `ordered.sequence[i]`.
Skeleton build_skeleton(const OrderedTies& ordered, std::span<const std::size_t> leaf_counts,
                        std::size_t band_count, const LayoutParams& params);

struct Adornments {
  std::vector<SceneLeaf> leaves;
  std::vector<SceneFruit> fruits;
};

/// `leaves[i]` are the resolved contacts of `skeleton.ties[i]`.
Adornments place_adornments(const Skeleton& skeleton,
                            std::span<const std::vector<LeafChannelValues>> leaves,
                            const LayoutParams& params);

std::vector<SceneGlyph> place_ego_glyph(const EgoChannelValues& ego, const Skeleton& skeleton,
                                        const LayoutParams& params);

std::vector<CubicChain<double>> smooth_lines(const Skeleton& skeleton, const LayoutParams& params);

/// Inclusive date range; either end may be open.
struct Period {
  std::optional<Date> from;
  std::optional<Date> to;

  /// "2004", "2004-01-01..2004-03-31", "..2008-12-31", "2004-02-01..".
  static Period parse(std::string_view text);
  bool contains(const Date& d) const;
  bool unbounded() const { return !from && !to; }
  std::string label() const;
};

/// Full pipeline for one ego. Unmappable ties are excluded and listed in the
/// scene meta. Throws UnknownEgo or InvalidMapping.
SceneGraph layout_tree(const Diary& diary, std::string_view ego, const std::optional<Period>& period,
                       const MappingSpec& spec, const LayoutParams& params);

}  // namespace contacttrees
