#include "contacttrees/synth.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "contacttrees/error.hpp"
#include "json_util.hpp"

namespace contacttrees {

using detail::json;

namespace {

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : engine_(seed) {}

  // Uniform integer in [0, n) by rejection.
  std::uint64_t below(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do x = engine_();
    while (x >= limit);
    return x % n;
  }

  std::int64_t between(std::int64_t lo, std::int64_t hi) {
    return lo + std::int64_t(below(std::uint64_t(hi - lo) + 1));
  }

  double unit() { return double(engine_() >> 11) * 0x1.0p-53; }

  bool chance(double p) { return unit() < p; }

  std::size_t weighted(const std::vector<double>& weights) {
    double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    double r = unit() * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (r < weights[i]) return i;
      r -= weights[i];
    }
    return weights.size() - 1;
  }

  std::int64_t count(const CountDistribution& d) {
    switch (d.kind) {
      case CountDistribution::Kind::Fixed: return d.value;
      case CountDistribution::Kind::Uniform: return between(d.min, d.max);
      case CountDistribution::Kind::Geometric: {
        // Failures before first success with p = 1 / (mean - min + 1).
        double p = 1.0 / (d.mean - double(d.min) + 1.0);
        std::int64_t n = d.min;
        while (!chance(p) && n < d.min + 100000) ++n;
        return n;
      }
    }
    return 0;
  }

 private:
  std::mt19937_64 engine_;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::InvalidProfile, what);
}

void check_weights(const std::vector<double>& w, std::size_t expected, const std::string& name) {
  require(w.size() == expected, name + " needs " + std::to_string(expected) + " weights");
  double total = 0;
  for (double x : w) {
    require(x >= 0, name + " weights must be non-negative");
    total += x;
  }
  require(total > 0, name + " weights must not all be zero");
}

void check_distribution(const CountDistribution& d, const std::string& name) {
  switch (d.kind) {
    case CountDistribution::Kind::Fixed:
      require(d.value >= 0, name + " must be non-negative");
      break;
    case CountDistribution::Kind::Uniform:
      require(d.min >= 0 && d.max >= d.min, name + " needs 0 <= min <= max");
      break;
    case CountDistribution::Kind::Geometric:
      require(d.min >= 0 && d.mean >= double(d.min), name + " needs 0 <= min <= mean");
      break;
  }
}

void check_profile(const SynthProfile& p) {
  require(p.egos > 0, "egos must be positive");
  check_distribution(p.ties_per_ego, "ties_per_ego");
  check_distribution(p.contacts_per_tie, "contacts_per_tie");
  if (p.contacts_total) require(*p.contacts_total >= 0, "contacts_total must be non-negative");
  const auto& m = p.marginals;
  for (double prob : {m.p_male, m.p_married, m.p_stranger})
    require(prob >= 0 && prob <= 1, "probabilities must lie in [0, 1]");
  require(m.ego_age_min >= 0 && m.ego_age_max >= m.ego_age_min, "bad ego age range");
  require(m.tie_age_min >= 0 && m.tie_age_max >= m.tie_age_min, "bad tie age range");
  require(m.years_known_max >= 0, "years_known_max must be non-negative");
  require(m.duration_min > 0 && m.duration_max >= m.duration_min, "bad duration range");
  require(m.date_from <= m.date_to, "date_from must not follow date_to");
  check_weights(m.liking_weights, canonical::liking_levels().size(), "liking");
  check_weights(m.feeling_weights, canonical::feeling_levels().size(), "feeling");
}

}  // namespace

SynthProfile stress_profile() {
  SynthProfile p;
  p.egos = 1;
  p.ties_per_ego = CountDistribution::fixed(819);
  p.contacts_total = 4091;
  return p;
}

Diary generate_synthetic_diary(std::uint64_t seed, const SynthProfile& profile) {
  check_profile(profile);
  const auto& m = profile.marginals;
  Sampler rng(seed);
  Diary diary;
  diary.schema = canonical_schema();
  const auto* liking = diary.schema.find(Entity::Tie, canonical::kLiking);
  const auto* feeling = diary.schema.find(Entity::Contact, canonical::kFeeling);

  auto gender = [&] { return std::string(rng.chance(m.p_male) ? "male" : "female"); };

  for (std::int64_t e = 1; e <= profile.egos; ++e) {
    Ego ego{"E" + std::to_string(e), {}};
    ego.attributes.emplace(canonical::kGender, gender());
    ego.attributes.emplace(canonical::kAge, rng.between(m.ego_age_min, m.ego_age_max));
    ego.attributes.emplace(canonical::kMaritalStatus,
                           std::string(rng.chance(m.p_married) ? "married" : "single"));
    diary.egos.push_back(std::move(ego));
  }

  std::size_t tie_seq = 0;
  for (const auto& ego : diary.egos) {
    auto n = rng.count(profile.ties_per_ego);
    for (std::int64_t t = 0; t < n; ++t) {
      Tie tie{"T" + std::to_string(++tie_seq), ego.id, {}};
      auto age = rng.between(m.tie_age_min, m.tie_age_max);
      bool stranger = rng.chance(m.p_stranger);
      tie.attributes.emplace(canonical::kGender, gender());
      tie.attributes.emplace(canonical::kAge, age);
      double years = 0.0;
      if (!stranger) years = double(rng.between(0, 2 * std::min(age, m.years_known_max))) / 2.0;
      tie.attributes.emplace(canonical::kYearsKnown, years);
      tie.attributes.emplace(canonical::kIsStranger, stranger);
      tie.attributes.emplace(canonical::kLiking,
                             Ordinal(rng.weighted(m.liking_weights), liking->scale));
      diary.ties.push_back(std::move(tie));
    }
  }

  std::vector<std::int64_t> per_tie(diary.ties.size(), 0);
  if (profile.contacts_total) {
    std::int64_t remaining = *profile.contacts_total;
    if (!per_tie.empty()) {
      if (remaining >= std::int64_t(per_tie.size())) {
        std::fill(per_tie.begin(), per_tie.end(), 1);
        remaining -= std::int64_t(per_tie.size());
      }
      // Heavy-tailed integer weights so a few ties collect many contacts.
      std::vector<double> weights(per_tie.size());
      for (auto& w : weights) {
        auto k = double(rng.below(20));
        w = 1.0 + k * k;
      }
      for (; remaining > 0; --remaining) ++per_tie[rng.weighted(weights)];
    }
  } else {
    for (auto& c : per_tie) c = rng.count(profile.contacts_per_tie);
  }

  const auto span_days = m.date_to.days_since_epoch() - m.date_from.days_since_epoch();
  std::size_t contact_seq = 0;
  for (std::size_t i = 0; i < diary.ties.size(); ++i) {
    for (std::int64_t c = 0; c < per_tie[i]; ++c) {
      Contact contact{"C" + std::to_string(++contact_seq), diary.ties[i].id, {}};
      auto day = m.date_from.sys_days() + std::chrono::days{rng.between(0, span_days)};
      contact.attributes.emplace(canonical::kDate, Date{day});
      contact.attributes.emplace(canonical::kDuration,
                                 double(rng.between(m.duration_min, m.duration_max)));
      contact.attributes.emplace(canonical::kFeeling,
                                 Ordinal(rng.weighted(m.feeling_weights), feeling->scale));
      diary.contacts.push_back(std::move(contact));
    }
  }
  return diary;
}

// --- profile JSON -----------------------------------------------------------

namespace {

CountDistribution distribution_from_json(const json& j, const std::string& name) {
  if (j.is_number_integer()) return CountDistribution::fixed(j.get<std::int64_t>());
  require(j.is_object() && j.contains("kind"), name + " must be an integer or {kind, ...}");
  auto kind = j.at("kind").get<std::string>();
  if (kind == "fixed") return CountDistribution::fixed(j.at("value").get<std::int64_t>());
  if (kind == "uniform")
    return CountDistribution::uniform(j.at("min").get<std::int64_t>(),
                                      j.at("max").get<std::int64_t>());
  if (kind == "geometric")
    return CountDistribution::geometric(j.at("mean").get<double>(), j.value("min", std::int64_t{0}));
  throw Error(ErrorKind::InvalidProfile, name + ": unknown kind '" + kind + "'");
}

json distribution_to_json(const CountDistribution& d) {
  switch (d.kind) {
    case CountDistribution::Kind::Fixed: return {{"kind", "fixed"}, {"value", d.value}};
    case CountDistribution::Kind::Uniform:
      return {{"kind", "uniform"}, {"min", d.min}, {"max", d.max}};
    case CountDistribution::Kind::Geometric:
      return {{"kind", "geometric"}, {"mean", d.mean}, {"min", d.min}};
  }
  return {};
}

void range_from_json(const json& j, const char* key, std::int64_t& lo, std::int64_t& hi) {
  if (!j.contains(key)) return;
  const auto& r = j.at(key);
  require(r.is_array() && r.size() == 2, std::string(key) + " must be [min, max]");
  lo = r[0].get<std::int64_t>();
  hi = r[1].get<std::int64_t>();
}

Date date_from_json(const json& j, const char* key, Date fallback) {
  if (!j.contains(key)) return fallback;
  auto d = Date::parse(j.at(key).get<std::string>());
  require(d.has_value(), std::string(key) + " must be YYYY-MM-DD");
  return *d;
}

}  // namespace

SynthProfile parse_synth_profile(std::string_view json_bytes) {
  auto j = detail::parse_json_text(json_bytes, "profile");
  require(j.is_object(), "profile must be a JSON object");
  SynthProfile p;
  try {
    if (j.value("preset", std::string{}) == "stress") p = stress_profile();
    if (j.contains("egos")) p.egos = j.at("egos").get<std::int64_t>();
    if (j.contains("ties_per_ego"))
      p.ties_per_ego = distribution_from_json(j.at("ties_per_ego"), "ties_per_ego");
    if (j.contains("contacts_per_tie"))
      p.contacts_per_tie = distribution_from_json(j.at("contacts_per_tie"), "contacts_per_tie");
    if (j.contains("contacts_total")) {
      if (j.at("contacts_total").is_null())
        p.contacts_total.reset();
      else
        p.contacts_total = j.at("contacts_total").get<std::int64_t>();
    }
    if (j.contains("marginals")) {
      const auto& mj = j.at("marginals");
      auto& m = p.marginals;
      m.p_male = mj.value("p_male", m.p_male);
      m.p_married = mj.value("p_married", m.p_married);
      m.p_stranger = mj.value("p_stranger", m.p_stranger);
      range_from_json(mj, "ego_age", m.ego_age_min, m.ego_age_max);
      range_from_json(mj, "tie_age", m.tie_age_min, m.tie_age_max);
      range_from_json(mj, "duration_minutes", m.duration_min, m.duration_max);
      m.years_known_max = mj.value("years_known_max", m.years_known_max);
      m.liking_weights = mj.value("liking_weights", m.liking_weights);
      m.feeling_weights = mj.value("feeling_weights", m.feeling_weights);
      m.date_from = date_from_json(mj, "date_from", m.date_from);
      m.date_to = date_from_json(mj, "date_to", m.date_to);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidProfile, std::string("profile: ") + e.what());
  }
  check_profile(p);
  return p;
}

std::string serialize_synth_profile(const SynthProfile& p) {
  const auto& m = p.marginals;
  json j{{"egos", p.egos},
         {"ties_per_ego", distribution_to_json(p.ties_per_ego)},
         {"contacts_per_tie", distribution_to_json(p.contacts_per_tie)},
         {"contacts_total", p.contacts_total ? json(*p.contacts_total) : json(nullptr)},
         {"marginals",
          {{"p_male", m.p_male},
           {"p_married", m.p_married},
           {"p_stranger", m.p_stranger},
           {"ego_age", {m.ego_age_min, m.ego_age_max}},
           {"tie_age", {m.tie_age_min, m.tie_age_max}},
           {"duration_minutes", {m.duration_min, m.duration_max}},
           {"years_known_max", m.years_known_max},
           {"liking_weights", m.liking_weights},
           {"feeling_weights", m.feeling_weights},
           {"date_from", m.date_from.iso()},
           {"date_to", m.date_to.iso()}}}};
  return j.dump(2) + "\n";
}

}  // namespace contacttrees
