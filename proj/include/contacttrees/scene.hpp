#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "contacttrees/geometry.hpp"
#include "contacttrees/mapping.hpp"
#include "contacttrees/spline.hpp"

namespace contacttrees {

struct LegendEntry {
  std::string channel;   // "trunk_side", "trunk_position", ...
  std::string encoding;  // human-readable rule
  std::string swatch;    // glyph kind drawn next to the text
  std::vector<std::string> labels;

  bool operator==(const LegendEntry&) const = default;
};

struct LegendModel {
  std::vector<LegendEntry> entries;

  const LegendEntry* find(std::string_view channel) const;
  bool operator==(const LegendModel&) const = default;
};

/// JSON-representable attribute copy carried for viewer-side highlighting.
using MetaValue = std::variant<bool, std::int64_t, double, std::string>;
using MetaMap = std::map<std::string, MetaValue>;

MetaMap to_meta(const AttributeMap& attributes);

struct SceneCurve {
  std::string tie;
  std::size_t base_index = 0;
  Side side = Side::Left;
  std::size_t band = 0;
  BranchSide branch_side = BranchSide::Below;
  int fruit_count = 0;
  CubicChain<double> chain;
  double stroke_width = 0.0;
  double shade = 0.0;  // trunk ramp position, 0 = darkest
  std::string color;
  MetaMap attributes;
};

struct SceneLeaf {
  std::string contact;
  std::string tie;
  Vec2d center = Vec2d::Zero();
  double angle = 0.0;  // degrees, counter-clockwise from +x, along the leaf's long axis
  double radius = 0.0;
  double darkness = 0.0;
};

struct SceneFruit {
  std::string tie;
  Vec2d center = Vec2d::Zero();
  double radius = 0.0;
  int slot = 0;
};

struct SceneGlyph {
  std::string kind = "bird";
  Vec2d position = Vec2d::Zero();
  double size = 0.0;
  Side side = Side::Left;
  std::size_t band = 0;
  int slot = 0;
  int count = 1;
};

struct Exclusion {
  std::string id;
  std::string reason;

  bool operator==(const Exclusion&) const = default;
};

struct SceneMeta {
  std::string ego;
  std::string period;
  std::string mapping_name;
  std::vector<std::string> band_labels;
  std::vector<Exclusion> excluded_ties;
  std::vector<Exclusion> excluded_contacts;
  std::vector<std::string> notes;
};

/// Render-ready tree. Coordinates are y-up with the trunk base centred at x = 0.
struct SceneGraph {
  SceneMeta meta;
  std::vector<SceneCurve> curves;   // by base_index
  std::vector<SceneLeaf> leaves;    // by contact id
  std::vector<SceneFruit> fruits;   // by curve, then slot
  std::vector<SceneGlyph> glyphs;
  LegendModel legend;
  Box2d legend_box;
  Box2d bounds;
};

struct Palette {
  std::string trunk_dark = "#3e2614";
  std::string trunk_light = "#9a6b3f";
  std::string leaf_light = "#c5e39a";
  std::string leaf_dark = "#1e5b1e";
  std::string fruit = "#e0542c";
  std::string bird = "#3a3a3a";
  std::string background = "#ffffff";
  std::string text = "#222222";
};

/// Linear blend of two #rrggbb colours, t in [0, 1].
std::string mix_hex(const std::string& from, const std::string& to, double t);

}  // namespace contacttrees
