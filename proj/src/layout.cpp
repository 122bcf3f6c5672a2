#include "contacttrees/layout.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>
#include <unordered_map>

#include "contacttrees/error.hpp"
#include "contacttrees/render.hpp"
#include "json_util.hpp"

namespace contacttrees {

using detail::json;

// --- params -----------------------------------------------------------------

void LayoutParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0) || !std::isfinite(v))
      throw Error(ErrorKind::InvalidParams, std::string(name) + " must be a positive length");
  };
  positive(line_spacing, "line_spacing");
  positive(stroke_width, "stroke_width");
  positive(trunk_base_rise, "trunk_base_rise");
  positive(band_height, "band_height");
  positive(main_branch_gap, "main_branch_gap");
  positive(seg2_base_length, "seg2_base_length");
  positive(seg3_step, "seg3_step");
  positive(seg4_length, "seg4_length");
  positive(seg5_per_leaf, "seg5_per_leaf");
  positive(seg5_min, "seg5_min");
  positive(leaf_radius_min, "leaf_radius_min");
  positive(leaf_radius_max, "leaf_radius_max");
  positive(leaf_spacing, "leaf_spacing");
  positive(fruit_radius, "fruit_radius");
  positive(bird_size, "bird_size");
  positive(legend_row_height, "legend_row_height");
  if (!(seg2_shrink > 0 && seg2_shrink <= 1))
    throw Error(ErrorKind::InvalidParams, "seg2_shrink must lie in (0, 1]");
  if (!(leaf_radius_min < leaf_radius_max))
    throw Error(ErrorKind::InvalidParams, "leaf_radius_min must be below leaf_radius_max");
  if (spline_samples < 4) throw Error(ErrorKind::InvalidParams, "spline_samples must be >= 4");
  if (!(spline_max_spacing >= 0))
    throw Error(ErrorKind::InvalidParams, "spline_max_spacing must be >= 0");
  if (!(branch_base_angle > 0 && branch_base_angle < 90) || !(angle_floor > 0) ||
      !(angle_floor <= branch_base_angle) || !(angle_sharpen >= 0))
    throw Error(ErrorKind::InvalidParams, "branch angles must satisfy 0 < floor <= base < 90");
  if (!(seg4_angle >= 0 && seg4_angle < 90))
    throw Error(ErrorKind::InvalidParams, "seg4_angle must lie in [0, 90)");
}

double LayoutParams::band_base_y(std::size_t band) const {
  return trunk_base_rise + double(band) * (band_height + main_branch_gap);
}

double LayoutParams::branch_angle(std::size_t band) const {
  return std::max(branch_base_angle - double(band) * angle_sharpen, angle_floor);
}

double LayoutParams::seg2_length(std::size_t band) const {
  return seg2_base_length * std::pow(seg2_shrink, double(band));
}

namespace {

// Field table shared by parse and serialize.
template <typename Fn>
void for_each_param(LayoutParams& p, Fn&& fn) {
  fn("line_spacing", p.line_spacing);
  fn("stroke_width", p.stroke_width);
  fn("trunk_base_rise", p.trunk_base_rise);
  fn("band_height", p.band_height);
  fn("main_branch_gap", p.main_branch_gap);
  fn("seg2_base_length", p.seg2_base_length);
  fn("seg2_shrink", p.seg2_shrink);
  fn("branch_base_angle", p.branch_base_angle);
  fn("angle_sharpen", p.angle_sharpen);
  fn("angle_floor", p.angle_floor);
  fn("seg3_step", p.seg3_step);
  fn("seg4_length", p.seg4_length);
  fn("seg4_angle", p.seg4_angle);
  fn("seg5_per_leaf", p.seg5_per_leaf);
  fn("seg5_min", p.seg5_min);
  fn("leaf_radius_min", p.leaf_radius_min);
  fn("leaf_radius_max", p.leaf_radius_max);
  fn("leaf_spacing", p.leaf_spacing);
  fn("leaf_tilt", p.leaf_tilt);
  fn("fruit_radius", p.fruit_radius);
  fn("spline_samples", p.spline_samples);
  fn("spline_max_spacing", p.spline_max_spacing);
  fn("bird_size", p.bird_size);
  fn("bird_margin", p.bird_margin);
  fn("legend_row_height", p.legend_row_height);
  fn("legend_padding", p.legend_padding);
  fn("legend_min_width", p.legend_min_width);
  fn("legend_gap", p.legend_gap);
}

}  // namespace

LayoutParams parse_layout_params(std::string_view json_bytes) {
  auto j = detail::parse_json_text(json_bytes, "params");
  if (!j.is_object()) throw Error(ErrorKind::InvalidParams, "params must be a JSON object");
  LayoutParams p;
  std::size_t used = 0;
  for_each_param(p, [&](const char* name, auto& field) {
    if (!j.contains(name)) return;
    ++used;
    const auto& v = j.at(name);
    if (!v.is_number()) throw Error(ErrorKind::InvalidParams, std::string(name) + " must be a number");
    field = v.get<std::remove_reference_t<decltype(field)>>();
  });
  if (used != j.size()) {
    for (const auto& [key, _] : j.items()) {
      bool known = false;
      for_each_param(p, [&](const char* name, auto&) { known = known || key == name; });
      if (!known) throw Error(ErrorKind::InvalidParams, "unknown layout parameter '" + key + "'");
    }
  }
  p.validate();
  return p;
}

std::string serialize_layout_params(const LayoutParams& params) {
  LayoutParams copy = params;
  json j = json::object();
  for_each_param(copy, [&](const char* name, auto& field) { j[name] = field; });
  return j.dump(2) + "\n";
}

// --- step 1: ordering -------------------------------------------------------

OrderedTies order_ties(std::vector<TieChannelValues> resolved) {
  auto key = [](const TieChannelValues& t) {
    if (t.side == Side::Left)
      return std::make_tuple(0, std::int64_t(t.band), int(t.branch_side), std::cref(t.tie));
    return std::make_tuple(1, -std::int64_t(t.band), t.branch_side == BranchSide::Above ? 0 : 1,
                           std::cref(t.tie));
  };
  std::sort(resolved.begin(), resolved.end(),
            [&](const auto& a, const auto& b) { return key(a) < key(b); });
  return OrderedTies{std::move(resolved)};
}

// --- step 2: skeleton -------------------------------------------------------

const MainBranch* Skeleton::branch(Side side, std::size_t band) const {
  for (const auto& b : branches)
    if (b.side == side && b.band == band) return &b;
  return nullptr;
}

Skeleton build_skeleton(const OrderedTies& ordered, std::span<const std::size_t> leaf_counts,
                        std::size_t band_count, const LayoutParams& params) {
  params.validate();
  const auto& seq = ordered.sequence;
  if (leaf_counts.size() != seq.size())
    throw Error(ErrorKind::InvalidParams, "one leaf count per tie is required");

  Skeleton sk;
  sk.band_count = band_count;
  const double ls = params.line_spacing;
  const auto left_count =
      std::count_if(seq.begin(), seq.end(), [](const auto& t) { return t.side == Side::Left; });
  const double center_offset = (double(left_count) - 0.5) * ls;

  std::map<std::pair<int, std::size_t>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (seq[i].band >= band_count)
      throw Error(ErrorKind::BandOutOfRange, "tie '" + seq[i].tie + "' has band " +
                                                 std::to_string(seq[i].band) + " of " +
                                                 std::to_string(band_count));
    groups[{int(seq[i].side), seq[i].band}].push_back(i);
  }

  sk.ties.resize(seq.size());
  for (const auto& [key, members] : groups) {
    const Side side = Side(key.first);
    const std::size_t band = key.second;
    const bool left = side == Side::Left;

    MainBranch mb;
    mb.side = side;
    mb.band = band;
    mb.ties = members.size();
    mb.seg2_angle = params.branch_angle(band);
    mb.seg2_length = params.seg2_length(band);
    mb.axis = lean_from_vertical(mb.seg2_angle, left);
    const std::size_t outer = left ? members.front() : members.back();
    mb.trunk_point = Vec2d(double(outer) * ls - center_offset, params.band_base_y(band));
    mb.anchor = mb.trunk_point + mb.seg2_length * mb.axis;
    const Vec2d up = upper_normal(mb.axis);

    for (std::size_t pos = 0; pos < members.size(); ++pos) {
      const std::size_t i = members[pos];
      auto& ts = sk.ties[i];
      ts.channels = seq[i];
      ts.base_index = i;
      ts.rank = left ? pos : members.size() - 1 - pos;
      ts.leaf_count = leaf_counts[i];

      const double sign = seq[i].branch_side == BranchSide::Above ? 1.0 : -1.0;
      const double a = params.seg4_angle * M_PI / 180.0;
      const Vec2d small_dir = std::cos(a) * mb.axis + std::sin(a) * sign * up;
      const double seg5 =
          std::max(params.seg5_min, double(ts.leaf_count) * params.seg5_per_leaf);

      ts.points.resize(6, 2);
      const Vec2d p0(double(i) * ls - center_offset, 0.0);
      const Vec2d p1(p0.x(), mb.trunk_point.y());
      const Vec2d p3 = mb.anchor + double(ts.rank) * params.seg3_step * mb.axis +
                       sign * params.stroke_width * up;
      const Vec2d p4 = p3 + params.seg4_length * small_dir;
      const Vec2d p5 = p4 + seg5 * small_dir;
      ts.points.row(0) = p0.transpose();
      ts.points.row(1) = p1.transpose();
      ts.points.row(2) = mb.anchor.transpose();
      ts.points.row(3) = p3.transpose();
      ts.points.row(4) = p4.transpose();
      ts.points.row(5) = p5.transpose();
    }
    sk.branches.push_back(mb);
  }
  return sk;
}

// --- step 3: leaves and fruits ----------------------------------------------

Adornments place_adornments(const Skeleton& skeleton,
                            std::span<const std::vector<LeafChannelValues>> leaves,
                            const LayoutParams& params) {
  if (leaves.size() != skeleton.ties.size())
    throw Error(ErrorKind::UnknownTie, "leaf lists do not match the skeleton's ties");
  Adornments out;
  const double tilt = params.leaf_tilt * M_PI / 180.0;
  for (std::size_t t = 0; t < skeleton.ties.size(); ++t) {
    const auto& ts = skeleton.ties[t];
    const Vec2d start = ts.points.row(4).transpose();
    const Vec2d end = ts.points.row(5).transpose();
    const double length = (end - start).norm();
    const Vec2d dir = (end - start) / length;
    const Vec2d up = upper_normal(dir);

    std::vector<const LeafChannelValues*> sorted;
    for (const auto& l : leaves[t]) sorted.push_back(&l);
    std::sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) {
      return std::tie(a->order_key, a->contact) < std::tie(b->order_key, b->contact);
    });
    double spacing = params.leaf_spacing;
    if (sorted.size() > 1 && double(sorted.size() - 1) * spacing > length)
      spacing = length / double(sorted.size() - 1);

    for (std::size_t i = 0; i < sorted.size(); ++i) {
      const auto& l = *sorted[i];
      bool above = l.side == LeafSide::Above || (l.side == LeafSide::Alternate && i % 2 == 0);
      const Vec2d normal = above ? up : Vec2d(-up);
      const Vec2d axis = std::cos(tilt) * dir + std::sin(tilt) * normal;
      SceneLeaf leaf;
      leaf.contact = l.contact;
      leaf.tie = ts.channels.tie;
      leaf.radius = params.leaf_radius_min +
                    std::clamp(l.size, 0.0, 1.0) * (params.leaf_radius_max - params.leaf_radius_min);
      leaf.center = start + double(i) * spacing * dir + leaf.radius * axis;
      leaf.angle = std::atan2(axis.y(), axis.x()) * 180.0 / M_PI;
      leaf.darkness = std::clamp(l.darkness, 0.0, 1.0);
      out.leaves.push_back(std::move(leaf));
    }

    const double fr = params.fruit_radius;
    for (int k = 0; k < ts.channels.fruit_count; ++k) {
      SceneFruit f;
      f.tie = ts.channels.tie;
      f.radius = fr;
      f.slot = k;
      f.center = start + (1.25 * fr + 2.5 * fr * k) * dir - (fr + params.stroke_width / 2) * up;
      out.fruits.push_back(std::move(f));
    }
  }
  std::sort(out.leaves.begin(), out.leaves.end(),
            [](const auto& a, const auto& b) { return a.contact < b.contact; });
  return out;
}

// --- step 4: ego glyph ------------------------------------------------------

std::vector<SceneGlyph> place_ego_glyph(const EgoChannelValues& ego, const Skeleton& skeleton,
                                        const LayoutParams& params) {
  if (ego.band >= skeleton.band_count)
    throw Error(ErrorKind::BandOutOfRange, "ego band " + std::to_string(ego.band) +
                                               " outside the " +
                                               std::to_string(skeleton.band_count) + " bands");
  const double sign = ego.side == Side::Left ? -1.0 : 1.0;
  double widest = params.line_spacing / 2;
  bool band_found = false;
  for (const auto& ts : skeleton.ties) {
    if (ts.channels.side != ego.side) continue;
    if (ts.channels.band == ego.band) {
      if (!band_found) widest = 0;
      band_found = true;
      widest = std::max(widest, (sign * ts.points.col(0)).maxCoeff() + 2 * params.leaf_radius_max);
    } else if (!band_found) {
      widest = std::max(widest, sign * ts.points(0, 0));
    }
  }
  const double y =
      params.band_base_y(ego.band) +
      params.seg2_length(ego.band) * std::cos(params.branch_angle(ego.band) * M_PI / 180.0);
  std::vector<SceneGlyph> out;
  for (int k = 0; k < std::clamp(ego.count, 1, 2); ++k) {
    SceneGlyph g;
    g.kind = "bird";
    g.size = params.bird_size;
    g.side = ego.side;
    g.band = ego.band;
    g.slot = k;
    g.count = std::clamp(ego.count, 1, 2);
    g.position =
        Vec2d(sign * (widest + params.bird_margin + params.bird_size * (0.5 + 1.3 * k)), y);
    out.push_back(g);
  }
  return out;
}

// --- smoothing --------------------------------------------------------------

std::vector<CubicChain<double>> smooth_lines(const Skeleton& skeleton, const LayoutParams& params) {
  std::vector<CubicChain<double>> out;
  out.reserve(skeleton.ties.size());
  for (const auto& ts : skeleton.ties)
    out.push_back(smooth_polyline(ts.points, params.spline_samples, params.spline_max_spacing));
  return out;
}

// --- period -----------------------------------------------------------------

Period Period::parse(std::string_view text) {
  auto bad = [&] {
    return Error(ErrorKind::MalformedInput, "invalid period '" + std::string(text) + "'");
  };
  auto sep = text.find("..");
  if (sep == std::string_view::npos) {
    int year = 0;
    if (text.size() != 4 || !std::all_of(text.begin(), text.end(), ::isdigit)) throw bad();
    year = std::stoi(std::string(text));
    return Period{Date::from_ymd(year, 1, 1), Date::from_ymd(year, 12, 31)};
  }
  Period p;
  auto lhs = text.substr(0, sep), rhs = text.substr(sep + 2);
  if (!lhs.empty()) {
    auto d = Date::parse(lhs);
    if (!d) throw bad();
    p.from = d;
  }
  if (!rhs.empty()) {
    auto d = Date::parse(rhs);
    if (!d) throw bad();
    p.to = d;
  }
  if (p.unbounded() || (p.from && p.to && *p.to < *p.from)) throw bad();
  return p;
}

bool Period::contains(const Date& d) const {
  return (!from || *from <= d) && (!to || d <= *to);
}

std::string Period::label() const {
  if (from && to) {
    std::chrono::year_month_day a{from->sys_days()}, b{to->sys_days()};
    if (a.year() == b.year() && a.month() == std::chrono::January && a.day() == std::chrono::day{1} &&
        b.month() == std::chrono::December && b.day() == std::chrono::day{31})
      return std::to_string(int(a.year()));
  }
  return (from ? from->iso() : "") + ".." + (to ? to->iso() : "");
}

// --- pipeline ---------------------------------------------------------------

namespace {

std::size_t utf8_length(std::string_view s) {
  return std::size_t(std::count_if(s.begin(), s.end(), [](char c) { return (c & 0xC0) != 0x80; }));
}

void extend(Box2d& box, const Vec2d& center, double radius) {
  box.extend(center - Vec2d::Constant(radius));
  box.extend(center + Vec2d::Constant(radius));
}

}  // namespace

SceneGraph layout_tree(const Diary& diary, std::string_view ego_id,
                       const std::optional<Period>& period, const MappingSpec& spec,
                       const LayoutParams& params) {
  params.validate();
  const Ego* ego = diary.find_ego(ego_id);
  if (!ego) throw Error(ErrorKind::UnknownEgo, "unknown ego '" + std::string(ego_id) + "'");
  auto mapping_report = validate_mapping(spec, diary.schema);
  if (!mapping_report.ok()) {
    const auto& e = mapping_report.errors.front();
    throw Error(ErrorKind::InvalidMapping, "mapping channel " + e.id + ": " + e.message);
  }

  SceneGraph scene;
  scene.meta.ego = ego->id;
  scene.meta.period = period && !period->unbounded() ? period->label() : "";
  scene.meta.mapping_name = spec.name;
  scene.meta.band_labels = spec.trunk_position.band_labels;
  const bool filter = period && !period->unbounded();

  std::unordered_map<std::string_view, std::vector<const Contact*>> by_tie;
  for (const auto& c : diary.contacts) by_tie[c.tie].push_back(&c);

  // Resolve ties and collect their in-period contacts.
  std::vector<TieChannelValues> resolved;
  std::unordered_map<std::string_view, const Tie*> tie_by_id;
  std::unordered_map<std::string_view, std::vector<const Contact*>> kept;
  std::vector<const Contact*> all_kept;
  for (const auto& tie : diary.ties) {
    if (tie.ego != ego->id) continue;
    std::vector<const Contact*> contacts;
    if (auto it = by_tie.find(tie.id); it != by_tie.end()) {
      for (const auto* c : it->second) {
        if (filter) {
          auto d = c->attributes.find(std::string(canonical::kDate));
          if (d == c->attributes.end() || !std::holds_alternative<Date>(d->second) ||
              !period->contains(std::get<Date>(d->second)))
            continue;
        }
        contacts.push_back(c);
      }
    }
    if (filter && contacts.empty()) {
      scene.meta.excluded_ties.push_back({tie.id, "no contacts in period"});
      continue;
    }
    try {
      resolved.push_back(resolve_tie_channels(spec, tie));
    } catch (const Error& e) {
      scene.meta.excluded_ties.push_back({tie.id, std::string(to_string(e.kind())) + ": " + e.what()});
      continue;
    }
    tie_by_id[tie.id] = &tie;
    all_kept.insert(all_kept.end(), contacts.begin(), contacts.end());
    kept[tie.id] = std::move(contacts);
  }

  const LeafNorms norms = compute_leaf_norms(spec, all_kept);
  auto ordered = order_ties(std::move(resolved));

  std::vector<std::vector<LeafChannelValues>> leaves(ordered.sequence.size());
  std::vector<std::size_t> leaf_counts(ordered.sequence.size());
  for (std::size_t i = 0; i < ordered.sequence.size(); ++i) {
    for (const auto* c : kept[ordered.sequence[i].tie]) {
      try {
        leaves[i].push_back(resolve_contact_channels(spec, *c, norms));
      } catch (const Error& e) {
        scene.meta.excluded_contacts.push_back(
            {c->id, std::string(to_string(e.kind())) + ": " + e.what()});
      }
    }
    leaf_counts[i] = leaves[i].size();
  }

  const std::size_t band_count = spec.trunk_position.band_count();
  auto skeleton = build_skeleton(ordered, leaf_counts, band_count, params);
  auto adornments = place_adornments(skeleton, leaves, params);
  auto chains = smooth_lines(skeleton, params);

  Palette palette;
  for (std::size_t i = 0; i < skeleton.ties.size(); ++i) {
    const auto& ts = skeleton.ties[i];
    SceneCurve curve;
    curve.tie = ts.channels.tie;
    curve.base_index = ts.base_index;
    curve.side = ts.channels.side;
    curve.band = ts.channels.band;
    curve.branch_side = ts.channels.branch_side;
    curve.fruit_count = ts.channels.fruit_count;
    curve.chain = std::move(chains[i]);
    curve.stroke_width = params.stroke_width;
    curve.shade = band_count > 1 ? double(ts.channels.band) / double(band_count - 1) : 0.0;
    curve.color = mix_hex(palette.trunk_dark, palette.trunk_light, curve.shade);
    curve.attributes = to_meta(tie_by_id.at(curve.tie)->attributes);
    scene.curves.push_back(std::move(curve));
  }
  scene.leaves = std::move(adornments.leaves);
  scene.fruits = std::move(adornments.fruits);

  if (spec.ego_glyph) {
    try {
      scene.glyphs = place_ego_glyph(resolve_ego_channels(spec, *ego), skeleton, params);
    } catch (const Error& e) {
      scene.meta.notes.push_back(std::string("no ego glyph: ") + e.what());
    }
  }

  Box2d tree;
  for (const auto& c : scene.curves)
    for (Eigen::Index r = 0; r < c.chain.controls.rows(); ++r)
      extend(tree, c.chain.controls.row(r).transpose(), c.stroke_width / 2);
  for (const auto& l : scene.leaves) extend(tree, l.center, l.radius);
  for (const auto& f : scene.fruits) extend(tree, f.center, f.radius);
  for (const auto& g : scene.glyphs) extend(tree, g.position, g.size / 2);

  scene.legend = legend_for(spec);
  const double rows = double(scene.legend.entries.size());
  const double height = rows * params.legend_row_height + 2 * params.legend_padding;
  std::size_t longest = 0;
  for (const auto& e : scene.legend.entries) longest = std::max(longest, utf8_length(e.encoding));
  // Glyph advance of the legend font is about 0.45 row heights; the swatch takes 14 units.
  const double text_width =
      double(longest) * 0.45 * params.legend_row_height + 14 + 2 * params.legend_padding;
  const double width = std::max({params.legend_min_width, text_width,
                                 tree.isEmpty() ? 0.0 : tree.max().x() - tree.min().x()});
  const double left = tree.isEmpty() ? -width / 2 : tree.min().x();
  const double top = std::min(tree.isEmpty() ? 0.0 : tree.min().y(), 0.0) - params.legend_gap;
  scene.legend_box = Box2d(Vec2d(left, top - height), Vec2d(left + width, top));

  scene.bounds = scene.legend_box;
  if (!tree.isEmpty()) scene.bounds.extend(tree);
  return scene;
}

}  // namespace contacttrees
