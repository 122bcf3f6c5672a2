#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "contacttrees/attribute.hpp"
#include "contacttrees/diary.hpp"

namespace contacttrees {

/// Distribution of a non-negative count.
struct CountDistribution {
  enum class Kind { Fixed, Uniform, Geometric };
  Kind kind = Kind::Fixed;
  std::int64_t value = 0;  // Fixed
  std::int64_t min = 0;    // Uniform, Geometric (lower bound)
  std::int64_t max = 0;    // Uniform
  double mean = 1.0;       // Geometric

  static CountDistribution fixed(std::int64_t v) { return {Kind::Fixed, v}; }
  static CountDistribution uniform(std::int64_t lo, std::int64_t hi) {
    return {Kind::Uniform, 0, lo, hi};
  }
  static CountDistribution geometric(double mean, std::int64_t lo) {
    return {Kind::Geometric, 0, lo, 0, mean};
  }
};

struct AttributeMarginals {
  double p_male = 0.5;
  double p_married = 0.5;
  double p_stranger = 0.05;
  std::int64_t ego_age_min = 18, ego_age_max = 80;
  std::int64_t tie_age_min = 0, tie_age_max = 99;
  std::int64_t years_known_max = 40;
  std::vector<double> liking_weights{1, 2, 4, 3};
  std::vector<double> feeling_weights{1, 2, 4, 4, 2};
  std::int64_t duration_min = 5, duration_max = 240;
  Date date_from = Date::from_ymd(2004, 1, 1);
  Date date_to = Date::from_ymd(2004, 3, 31);
};

struct SynthProfile {
  std::int64_t egos = 1;
  CountDistribution ties_per_ego = CountDistribution::uniform(5, 40);
  CountDistribution contacts_per_tie = CountDistribution::geometric(5.0, 1);
  /// When set, exactly this many contacts are spread over all generated ties,
  /// overriding contacts_per_tie.
  std::optional<std::int64_t> contacts_total;
  AttributeMarginals marginals;
};

/// One ego with 819 ties and 4,091 contacts in total.
SynthProfile stress_profile();

SynthProfile parse_synth_profile(std::string_view json_bytes);
std::string serialize_synth_profile(const SynthProfile& profile);

/// Deterministic in (seed, profile) on every platform: all sampling is done
/// from raw mt19937_64 output without library distributions.
Diary generate_synthetic_diary(std::uint64_t seed, const SynthProfile& profile);

}  // namespace contacttrees
