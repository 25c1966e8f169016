#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "cob/rng.hpp"
#include "cob/types.hpp"

namespace cob {

/// Inverse-transform sampler over {first, first + stride, ...}.
///
/// The cumulative table is built from unnormalised weights and its final
/// bucket is pinned to exactly 1.0, so every uniform draw in [0, 1) maps to
/// a valid outcome.
class DiscreteSampler {
 public:
  DiscreteSampler() = default;
  DiscreteSampler(const std::vector<double>& weights, std::int64_t first = 1,
                  std::int64_t stride = 1);

  std::int64_t operator()(Rng& rng) const;

  /// Normalised probability of the i-th outcome.
  double probability(std::size_t index) const;
  std::int64_t value(std::size_t index) const { return first_ + stride_ * static_cast<std::int64_t>(index); }
  std::size_t size() const { return cdf_.size(); }
  const std::vector<double>& cdf() const { return cdf_; }

  /// Sum of value * probability over the support.
  double mean() const;

 private:
  std::vector<double> cdf_;
  std::int64_t first_ = 1;
  std::int64_t stride_ = 1;
};

/// Weights k^-gamma for k = 1..count.
std::vector<double> power_law_weights(double gamma, std::int64_t count);

/// P(v) = v^-gamma / Z on {1..v_max}. Throws ConfigError unless gamma > 1
/// and v_max >= 1.
DiscreteSampler make_power_law(double gamma, std::int64_t v_max);

std::int64_t sample_power_law(double gamma, std::int64_t v_max, Rng& rng);

struct PowerLaw {
  double gamma = 2.5;
  std::int64_t v_max = 100;
};

/// Volumes drawn from one of three lot-size components: any size, multiples
/// of 10, multiples of 100. Each component is a power law over the multiple
/// index j, giving sizes m * j up to v_max.
struct RoundLotMixture {
  double w1 = 0.5, w10 = 0.3, w100 = 0.2;
  double gamma1 = 2.8, gamma10 = 2.5, gamma100 = 2.0;
  std::int64_t v_max = 1000;
};

using VolumeModel = std::variant<PowerLaw, RoundLotMixture>;

/// Flat head for l <= head_cut, power tail (l / head_cut)^-exponent above it,
/// normalised over 1..max_level.
struct LevelModel {
  double exponent = 2.5;
  int head_cut = 10;
  int max_level = 1000;
};

void validate(const VolumeModel& model);
void validate(const LevelModel& model);

/// Largest volume the model can produce.
std::int64_t max_volume(const VolumeModel& model);

/// Precomputed sampler for a VolumeModel.
class VolumeSampler {
 public:
  explicit VolumeSampler(const VolumeModel& model);

  std::int64_t operator()(Rng& rng) const;

  /// Exact expected volume (full sum over the support).
  double mean() const;

  /// Exact probability of each volume 1..max_volume, by enumeration.
  std::vector<double> pmf() const;

 private:
  std::vector<double> weights_;  // component weights; size 1 for PowerLaw
  std::vector<DiscreteSampler> parts_;
  DiscreteSampler chooser_;
};

class LevelSampler {
 public:
  explicit LevelSampler(const LevelModel& model);

  int operator()(Rng& rng) const { return static_cast<int>(sampler_(rng)); }
  double probability(int level) const { return sampler_.probability(static_cast<std::size_t>(level - 1)); }

 private:
  DiscreteSampler sampler_;
};

}  // namespace cob
