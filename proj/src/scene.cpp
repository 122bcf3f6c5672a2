#include "contacttrees/scene.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "contacttrees/error.hpp"

namespace contacttrees {

const LegendEntry* LegendModel::find(std::string_view channel) const {
  for (const auto& e : entries)
    if (e.channel == channel) return &e;
  return nullptr;
}

MetaMap to_meta(const AttributeMap& attributes) {
  MetaMap out;
  for (const auto& [name, value] : attributes) {
    std::visit(
        [&, &name = name](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, bool> || std::is_same_v<T, std::int64_t> ||
                        std::is_same_v<T, double> || std::is_same_v<T, std::string>)
            out.emplace(name, v);
          else
            out.emplace(name, display(value));
        },
        value);
  }
  return out;
}

namespace {

int channel(const std::string& hex, int index) {
  if (hex.size() != 7 || hex[0] != '#')
    throw Error(ErrorKind::InvalidParams, "colour '" + hex + "' is not #rrggbb");
  int v = 0;
  for (int k = 0; k < 2; ++k) {
    char c = hex[1 + 2 * index + k];
    int d = c >= '0' && c <= '9'   ? c - '0'
            : c >= 'a' && c <= 'f' ? c - 'a' + 10
            : c >= 'A' && c <= 'F' ? c - 'A' + 10
                                   : -1;
    if (d < 0) throw Error(ErrorKind::InvalidParams, "colour '" + hex + "' is not #rrggbb");
    v = v * 16 + d;
  }
  return v;
}

}  // namespace

std::string mix_hex(const std::string& from, const std::string& to, double t) {
  t = std::clamp(t, 0.0, 1.0);
  char buf[8];
  int rgb[3];
  for (int i = 0; i < 3; ++i)
    rgb[i] = int(std::lround(channel(from, i) + t * (channel(to, i) - channel(from, i))));
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
  return buf;
}

}  // namespace contacttrees
