#pragma once

#include <span>
#include <string>
#include <string_view>

#include "contacttrees/mapping.hpp"
#include "contacttrees/scene.hpp"

namespace contacttrees {

struct StyleSheet {
  Palette palette;
  std::string font_family = "Helvetica, Arial, sans-serif";
  double font_size = 10.0;
  int precision = 3;  // decimal places of every emitted coordinate

  void validate() const;
};

/// One entry per active channel of the mapping.
LegendModel legend_for(const MappingSpec& spec);

/// Standalone SVG 1.1. Element order: background, curves by base index,
/// leaves by contact id, fruits, glyphs, legend. Byte-identical for equal input.
std::string scene_to_svg(const SceneGraph& scene, const StyleSheet& style = {});

/// Canonical scene JSON: sorted keys, three-decimal numbers, arrays in SVG order.
std::string scene_to_json(const SceneGraph& scene);
SceneGraph parse_scene_json(std::string_view bytes);

struct ScenePanel {
  const SceneGraph* scene = nullptr;
  std::string caption;
};

/// Panels side by side at one shared scale, each with a caption.
std::string panels_to_svg(std::span<const ScenePanel> panels, const StyleSheet& style = {});

/// Fixed-point decimal text without exponent; "-0.000" prints as "0.000".
std::string format_fixed(double value, int precision);

}  // namespace contacttrees
