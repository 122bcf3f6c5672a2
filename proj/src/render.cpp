#include "contacttrees/render.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "contacttrees/error.hpp"
#include "json_util.hpp"

namespace contacttrees {

using detail::json;
using detail::round3;

namespace {

constexpr double kMargin = 12.0;
constexpr double kPanelGap = 40.0;
constexpr double kCaptionHeight = 24.0;
constexpr double kLeafAspect = 0.45;  // minor / major radius

// Gull silhouette inside the unit square centred at the origin, y-up.
constexpr double kBird[12][2] = {
    {-0.50, 0.10}, {-0.28, 0.30}, {-0.08, 0.10}, {0.08, 0.10}, {0.28, 0.30}, {0.50, 0.10},
    {0.28, 0.18},  {0.10, -0.02}, {0.04, -0.20}, {-0.04, -0.20}, {-0.10, -0.02}, {-0.28, 0.18},
};

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : std::string(sep)) + p;
  return out;
}

std::string escape_xml(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

class SvgWriter {
 public:
  explicit SvgWriter(const StyleSheet& style) : style_(style) {}

  std::string num(double v) const { return format_fixed(v, style_.precision); }
  // Scene space is y-up; SVG space is y-down.
  std::string pt(const Vec2d& p) const { return num(p.x()) + " " + num(-p.y()); }

  void line(std::string_view s) {
    out_ += indent_;
    out_ += s;
    out_ += '\n';
  }
  void open(std::string_view s) {
    line(s);
    indent_ += "  ";
  }
  void close(std::string_view tag) {
    indent_.resize(indent_.size() - 2);
    line(std::string("</") + std::string(tag) + ">");
  }

  void scene_body(const SceneGraph& scene) {
    const auto& pal = style_.palette;

    open(R"(<g class="curves" fill="none" stroke-linecap="round" stroke-linejoin="round">)");
    for (const auto& c : scene.curves) {
      std::string d = "M " + pt(c.chain.knot(0));
      for (Eigen::Index i = 0; i < c.chain.pieces(); ++i) {
        d += " C " + pt(c.chain.controls.row(3 * i + 1).transpose());
        d += " " + pt(c.chain.controls.row(3 * i + 2).transpose());
        d += " " + pt(c.chain.controls.row(3 * i + 3).transpose());
      }
      line("<path data-tie=\"" + escape_xml(c.tie) + "\" data-side=\"" +
           std::string(to_string(c.side)) + "\" data-band=\"" + std::to_string(c.band) +
           "\" stroke=\"" + c.color + "\" stroke-width=\"" + num(c.stroke_width) + "\" d=\"" + d +
           "\"/>");
    }
    close("g");

    open(R"(<g class="leaves">)");
    for (const auto& l : scene.leaves) {
      // Pointed ellipse: two mirrored quadratic arcs between the tips.
      const double a = l.angle * M_PI / 180.0;
      const Vec2d axis(std::cos(a), std::sin(a)), normal(-axis.y(), axis.x());
      const Vec2d tip0 = l.center - l.radius * axis, tip1 = l.center + l.radius * axis;
      const double bulge = 2 * kLeafAspect * l.radius;
      line("<path data-contact=\"" + escape_xml(l.contact) + "\" data-tie=\"" + escape_xml(l.tie) +
           "\" fill=\"" + mix_hex(pal.leaf_light, pal.leaf_dark, l.darkness) + "\" d=\"M " +
           pt(tip0) + " Q " + pt(l.center + bulge * normal) + " " + pt(tip1) + " Q " +
           pt(l.center - bulge * normal) + " " + pt(tip0) + " Z\"/>");
    }
    close("g");

    open("<g class=\"fruits\" fill=\"" + pal.fruit + "\">");
    for (const auto& f : scene.fruits)
      line("<circle data-tie=\"" + escape_xml(f.tie) + "\" cx=\"" + num(f.center.x()) +
           "\" cy=\"" + num(-f.center.y()) + "\" r=\"" + num(f.radius) + "\"/>");
    close("g");

    open("<g class=\"glyphs\" fill=\"" + pal.bird + "\">");
    for (const auto& g : scene.glyphs) {
      std::string d;
      for (const auto& p : kBird)
        d += (d.empty() ? "M " : " L ") +
             pt(g.position + g.size * Vec2d(p[0] * (g.side == Side::Left ? -1 : 1), p[1]));
      line("<path data-glyph=\"" + escape_xml(g.kind) + "\" data-slot=\"" + std::to_string(g.slot) +
           "\" d=\"" + d + " Z\"/>");
    }
    close("g");

    legend(scene);
  }

  void legend(const SceneGraph& scene) {
    const auto& pal = style_.palette;
    const Box2d& box = scene.legend_box;
    if (box.isEmpty()) return;
    open("<g class=\"legend\" font-family=\"" + escape_xml(style_.font_family) + "\" font-size=\"" +
         num(style_.font_size) + "\" fill=\"" + pal.text + "\">");
    line("<rect x=\"" + num(box.min().x()) + "\" y=\"" + num(-box.max().y()) + "\" width=\"" +
         num(box.sizes().x()) + "\" height=\"" + num(box.sizes().y()) +
         "\" fill=\"none\" stroke=\"" + pal.text + "\" stroke-width=\"0.500\"/>");
    const auto& entries = scene.legend.entries;
    const double pad = 8.0;
    const double row = entries.empty() ? 0.0 : (box.sizes().y() - 2 * pad) / double(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const auto& e = entries[i];
      const double top = -box.max().y() + pad + row * double(i);
      const double sx = box.min().x() + pad, sy = top + row / 2;
      if (e.swatch == "leaf") {
        line("<path d=\"M " + num(sx) + " " + num(sy) + " Q " + num(sx + 4) + " " +
             num(sy - 8 * kLeafAspect) + " " + num(sx + 8) + " " + num(sy) + " Q " + num(sx + 4) +
             " " + num(sy + 8 * kLeafAspect) + " " + num(sx) + " " + num(sy) + " Z\" fill=\"" +
             pal.leaf_dark + "\"/>");
      } else if (e.swatch == "fruit") {
        line("<circle cx=\"" + num(sx + 4) + "\" cy=\"" + num(sy) + "\" r=\"3.000\" fill=\"" +
             pal.fruit + "\"/>");
      } else if (e.swatch == "bird") {
        std::string d;
        for (const auto& p : kBird)
          d += (d.empty() ? "M " : " L ") + num(sx + 4 + 8 * p[0]) + " " + num(sy - 8 * p[1]);
        line("<path d=\"" + d + " Z\" fill=\"" + pal.bird + "\"/>");
      } else {
        line("<line x1=\"" + num(sx) + "\" y1=\"" + num(sy) + "\" x2=\"" + num(sx + 8) +
             "\" y2=\"" + num(sy) + "\" stroke=\"" + pal.trunk_dark + "\" stroke-width=\"2.000\"/>");
      }
      line("<text x=\"" + num(sx + 14) + "\" y=\"" + num(sy + style_.font_size * 0.35) + "\">" +
           escape_xml(e.encoding) + "</text>");
    }
    close("g");
  }

  std::string take() { return std::move(out_); }

 private:
  const StyleSheet& style_;
  std::string out_;
  std::string indent_;
};

Box2d padded(const Box2d& b) {
  Box2d out = b;
  if (out.isEmpty()) out = Box2d(Vec2d(-1, -1), Vec2d(1, 1));
  out.min().array() -= kMargin;
  out.max().array() += kMargin;
  return out;
}

}  // namespace

void StyleSheet::validate() const {
  if (precision < 1 || precision > 9)
    throw Error(ErrorKind::InvalidParams, "precision must lie in [1, 9]");
  if (palette.trunk_dark == palette.trunk_light || palette.leaf_light == palette.leaf_dark)
    throw Error(ErrorKind::InvalidParams, "colour ramp endpoints must differ");
  if (!(font_size > 0)) throw Error(ErrorKind::InvalidParams, "font_size must be positive");
  for (const auto* c : {&palette.trunk_dark, &palette.trunk_light, &palette.leaf_light,
                        &palette.leaf_dark, &palette.fruit, &palette.bird, &palette.background,
                        &palette.text})
    (void)mix_hex(*c, *c, 0.0);
}

std::string format_fixed(double value, int precision) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, precision);
  if (ec != std::errc{}) return "0";
  std::string s(buf, end);
  if (s[0] == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

LegendModel legend_for(const MappingSpec& spec) {
  LegendModel m;
  const auto& side = spec.trunk_side;
  std::string when_true = side.true_label.empty() ? side.when.describe() : side.true_label;
  std::string when_false = side.false_label.empty() ? side.when.describe(true) : side.false_label;
  if (side.when_true == Side::Right) std::swap(when_true, when_false);
  m.entries.push_back({"trunk_side", "left = " + when_true + ", right = " + when_false, "curve",
                       {when_true, when_false}});

  const auto& pos = spec.trunk_position;
  m.entries.push_back({"trunk_position",
                       "height: " + pos.source + " (" + join(pos.band_labels, ", ") + ")", "curve",
                       pos.band_labels});

  const auto& bs = spec.branch_side;
  const auto above = bs.above_label.empty() ? bs.above_when.describe() : bs.above_label;
  const auto below = bs.below_label.empty() ? bs.above_when.describe(true) : bs.below_label;
  m.entries.push_back(
      {"branch_side", "branch above = " + above + ", below = " + below, "curve", {above, below}});

  std::vector<std::string> fruit_labels;
  for (const auto& [value, count] : spec.fruit_count.table)
    fruit_labels.push_back(value + " = " + std::to_string(count));
  m.entries.push_back({"fruit_count",
                       "fruits: " + spec.fruit_count.source + " (" + join(fruit_labels, ", ") + ")",
                       "fruit", fruit_labels});

  m.entries.push_back({"leaf_order", "leaf order: " + spec.leaf_order, "leaf", {}});
  m.entries.push_back({"leaf_size", "leaf size: " + spec.leaf_size.source, "leaf", {}});
  m.entries.push_back({"leaf_darkness",
                       "leaf darkness: " + spec.leaf_darkness.source +
                           (spec.leaf_darkness.higher_is_darker ? " (darker = higher)"
                                                                : " (darker = lower)"),
                       "leaf",
                       {}});

  const auto& ls = spec.leaf_side;
  if (ls.mode == LeafSideRule::Mode::ByPredicate)
    m.entries.push_back({"leaf_side", "leaf above: " + ls.above_when.describe(), "leaf",
                         {ls.above_label, ls.below_label}});

  if (spec.ego_glyph) {
    const auto& g = *spec.ego_glyph;
    const bool gl = g.when_true == Side::Left;
    m.entries.push_back({"ego_glyph",
                         "bird: left if " + g.side_when.describe(!gl) + ", height by " +
                             g.band_source + ", two if " + g.count_source + " \xE2\x88\x88 {" +
                             join(g.two_bird_values, ", ") + "}",
                         "bird",
                         g.two_bird_values});
  }
  return m;
}

std::string scene_to_svg(const SceneGraph& scene, const StyleSheet& style) {
  style.validate();
  SvgWriter w(style);
  const Box2d view = padded(scene.bounds);
  const auto sizes = view.sizes();
  w.line(R"(<?xml version="1.0" encoding="UTF-8"?>)");
  w.open("<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + w.num(sizes.x()) +
         "\" height=\"" + w.num(sizes.y()) + "\" viewBox=\"" + w.num(view.min().x()) + " " +
         w.num(-view.max().y()) + " " + w.num(sizes.x()) + " " + w.num(sizes.y()) + "\">");
  w.line("<title>" + escape_xml("ego " + scene.meta.ego + (scene.meta.period.empty() ? "" : ", " + scene.meta.period)) + "</title>");
  w.line("<rect class=\"background\" x=\"" + w.num(view.min().x()) + "\" y=\"" +
         w.num(-view.max().y()) + "\" width=\"" + w.num(sizes.x()) + "\" height=\"" +
         w.num(sizes.y()) + "\" fill=\"" + style.palette.background + "\"/>");
  w.scene_body(scene);
  w.close("svg");
  return w.take();
}

std::string panels_to_svg(std::span<const ScenePanel> panels, const StyleSheet& style) {
  style.validate();
  if (panels.empty()) throw Error(ErrorKind::InvalidParams, "at least one panel is required");
  // One unit scale for all panels; rows share the ground line y = 0.
  double top = 0, bottom = 0, width = 0;
  std::vector<Box2d> views;
  for (const auto& p : panels) {
    if (!p.scene) throw Error(ErrorKind::InvalidParams, "panel without a scene");
    views.push_back(padded(p.scene->bounds));
    top = std::max(top, views.back().max().y());
    bottom = std::min(bottom, views.back().min().y());
    width += views.back().sizes().x();
  }
  width += kPanelGap * double(panels.size() - 1);
  const double height = top - bottom + kCaptionHeight;

  SvgWriter w(style);
  w.line(R"(<?xml version="1.0" encoding="UTF-8"?>)");
  w.open("<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + w.num(width) +
         "\" height=\"" + w.num(height) + "\" viewBox=\"0.000 " + w.num(-top - kCaptionHeight) +
         " " + w.num(width) + " " + w.num(height) + "\">");
  w.line("<rect class=\"background\" x=\"0.000\" y=\"" + w.num(-top - kCaptionHeight) +
         "\" width=\"" + w.num(width) + "\" height=\"" + w.num(height) + "\" fill=\"" +
         style.palette.background + "\"/>");
  double x = 0;
  for (std::size_t i = 0; i < panels.size(); ++i) {
    const double dx = x - views[i].min().x();
    w.open("<g class=\"panel\" data-ego=\"" + escape_xml(panels[i].scene->meta.ego) +
           "\" transform=\"translate(" + w.num(dx) + " 0.000)\">");
    w.line("<text x=\"" + w.num(views[i].center().x()) + "\" y=\"" +
           w.num(-top - kCaptionHeight / 3) + "\" text-anchor=\"middle\" font-family=\"" +
           escape_xml(style.font_family) + "\" font-size=\"" + w.num(style.font_size * 1.2) +
           "\" fill=\"" + style.palette.text + "\">" + escape_xml(panels[i].caption) + "</text>");
    w.scene_body(*panels[i].scene);
    w.close("g");
    x += views[i].sizes().x() + kPanelGap;
  }
  w.close("svg");
  return w.take();
}

// --- JSON -------------------------------------------------------------------

namespace {

json point_json(const Vec2d& p) { return json::array({round3(p.x()), round3(p.y())}); }

json box_json(const Box2d& b) {
  if (b.isEmpty()) return nullptr;
  return json::array(
      {round3(b.min().x()), round3(b.min().y()), round3(b.max().x()), round3(b.max().y())});
}

json meta_json(const MetaMap& m) {
  json j = json::object();
  for (const auto& [k, v] : m)
    std::visit(
        [&, &k = k](const auto& x) {
          if constexpr (std::is_same_v<std::decay_t<decltype(x)>, double>)
            j[k] = round3(x);
          else
            j[k] = x;
        },
        v);
  return j;
}

json exclusions_json(const std::vector<Exclusion>& list) {
  json a = json::array();
  for (const auto& e : list) a.push_back({{"id", e.id}, {"reason", e.reason}});
  return a;
}

Vec2d point_from(const json& j) { return Vec2d(j.at(0).get<double>(), j.at(1).get<double>()); }

Box2d box_from(const json& j) {
  if (j.is_null()) return Box2d();
  return Box2d(Vec2d(j.at(0).get<double>(), j.at(1).get<double>()),
               Vec2d(j.at(2).get<double>(), j.at(3).get<double>()));
}

Side side_from(const std::string& s) {
  if (s == "left") return Side::Left;
  if (s == "right") return Side::Right;
  throw Error(ErrorKind::MalformedInput, "unknown side '" + s + "'");
}

}  // namespace

std::string scene_to_json(const SceneGraph& scene) {
  json j;
  const auto& m = scene.meta;
  j["meta"] = {{"ego", m.ego},
               {"period", m.period},
               {"mapping_name", m.mapping_name},
               {"band_labels", m.band_labels},
               {"excluded_ties", exclusions_json(m.excluded_ties)},
               {"excluded_contacts", exclusions_json(m.excluded_contacts)},
               {"notes", m.notes}};

  json curves = json::array();
  for (const auto& c : scene.curves) {
    json controls = json::array();
    for (Eigen::Index r = 0; r < c.chain.controls.rows(); ++r)
      controls.push_back(point_json(c.chain.controls.row(r).transpose()));
    curves.push_back({{"tie", c.tie},
                      {"base_index", c.base_index},
                      {"side", to_string(c.side)},
                      {"band", c.band},
                      {"branch_side", to_string(c.branch_side)},
                      {"fruit_count", c.fruit_count},
                      {"stroke_width", round3(c.stroke_width)},
                      {"shade", round3(c.shade)},
                      {"color", c.color},
                      {"controls", std::move(controls)},
                      {"attributes", meta_json(c.attributes)}});
  }
  j["curves"] = std::move(curves);

  json leaves = json::array();
  for (const auto& l : scene.leaves)
    leaves.push_back({{"contact", l.contact},
                      {"tie", l.tie},
                      {"center", point_json(l.center)},
                      {"angle", round3(l.angle)},
                      {"radius", round3(l.radius)},
                      {"darkness", round3(l.darkness)}});
  j["leaves"] = std::move(leaves);

  json fruits = json::array();
  for (const auto& f : scene.fruits)
    fruits.push_back({{"tie", f.tie},
                      {"center", point_json(f.center)},
                      {"radius", round3(f.radius)},
                      {"slot", f.slot}});
  j["fruits"] = std::move(fruits);

  json glyphs = json::array();
  for (const auto& g : scene.glyphs)
    glyphs.push_back({{"kind", g.kind},
                      {"position", point_json(g.position)},
                      {"size", round3(g.size)},
                      {"side", to_string(g.side)},
                      {"band", g.band},
                      {"slot", g.slot},
                      {"count", g.count}});
  j["glyphs"] = std::move(glyphs);

  json legend = json::array();
  for (const auto& e : scene.legend.entries)
    legend.push_back({{"channel", e.channel},
                      {"encoding", e.encoding},
                      {"swatch", e.swatch},
                      {"labels", e.labels}});
  j["legend"] = std::move(legend);
  j["legend_box"] = box_json(scene.legend_box);
  j["bounds"] = box_json(scene.bounds);
  return j.dump(2) + "\n";
}

SceneGraph parse_scene_json(std::string_view bytes) {
  const json j = detail::parse_json_text(bytes, "scene");
  SceneGraph s;
  try {
    const auto& m = j.at("meta");
    s.meta.ego = m.at("ego").get<std::string>();
    s.meta.period = m.at("period").get<std::string>();
    s.meta.mapping_name = m.at("mapping_name").get<std::string>();
    s.meta.band_labels = m.at("band_labels").get<std::vector<std::string>>();
    for (const auto& e : m.at("excluded_ties"))
      s.meta.excluded_ties.push_back({e.at("id"), e.at("reason")});
    for (const auto& e : m.at("excluded_contacts"))
      s.meta.excluded_contacts.push_back({e.at("id"), e.at("reason")});
    s.meta.notes = m.at("notes").get<std::vector<std::string>>();

    for (const auto& c : j.at("curves")) {
      SceneCurve curve;
      curve.tie = c.at("tie");
      curve.base_index = c.at("base_index");
      curve.side = side_from(c.at("side"));
      curve.band = c.at("band");
      curve.branch_side = c.at("branch_side") == "above" ? BranchSide::Above : BranchSide::Below;
      curve.fruit_count = c.at("fruit_count");
      curve.stroke_width = c.at("stroke_width");
      curve.shade = c.at("shade");
      curve.color = c.at("color");
      const auto& controls = c.at("controls");
      curve.chain.controls.resize(Eigen::Index(controls.size()), 2);
      for (std::size_t r = 0; r < controls.size(); ++r)
        curve.chain.controls.row(Eigen::Index(r)) = point_from(controls[r]).transpose();
      for (const auto& [k, v] : c.at("attributes").items()) {
        if (v.is_boolean()) curve.attributes[k] = v.get<bool>();
        else if (v.is_number_integer()) curve.attributes[k] = v.get<std::int64_t>();
        else if (v.is_number()) curve.attributes[k] = v.get<double>();
        else curve.attributes[k] = v.get<std::string>();
      }
      s.curves.push_back(std::move(curve));
    }
    for (const auto& l : j.at("leaves"))
      s.leaves.push_back({l.at("contact"), l.at("tie"), point_from(l.at("center")), l.at("angle"),
                          l.at("radius"), l.at("darkness")});
    for (const auto& f : j.at("fruits"))
      s.fruits.push_back({f.at("tie"), point_from(f.at("center")), f.at("radius"), f.at("slot")});
    for (const auto& g : j.at("glyphs"))
      s.glyphs.push_back({g.at("kind"), point_from(g.at("position")), g.at("size"),
                          side_from(g.at("side")), g.at("band"), g.at("slot"), g.at("count")});
    for (const auto& e : j.at("legend"))
      s.legend.entries.push_back({e.at("channel"), e.at("encoding"), e.at("swatch"),
                                  e.at("labels").get<std::vector<std::string>>()});
    s.legend_box = box_from(j.at("legend_box"));
    s.bounds = box_from(j.at("bounds"));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::MalformedInput, std::string("scene JSON: ") + e.what());
  }
  return s;
}

}  // namespace contacttrees
