#include "cob/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "cob/error.hpp"

namespace cob {

DiscreteSampler::DiscreteSampler(const std::vector<double>& weights, std::int64_t first,
                                 std::int64_t stride)
    : first_(first), stride_(stride) {
  if (weights.empty()) throw ConfigError("discrete sampler needs at least one outcome");
  cdf_.resize(weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0)) throw ConfigError("discrete sampler weights must be nonnegative");
    acc += weights[i];
    cdf_[i] = acc;
  }
  if (!(acc > 0.0)) throw ConfigError("discrete sampler weights sum to zero");
  for (auto& c : cdf_) c /= acc;
  cdf_.back() = 1.0;
}

std::int64_t DiscreteSampler::operator()(Rng& rng) const {
  const double u = rng.uniform01();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  return value(static_cast<std::size_t>(it - cdf_.begin()));
}

double DiscreteSampler::probability(std::size_t index) const {
  if (index >= cdf_.size()) return 0.0;
  return index == 0 ? cdf_[0] : cdf_[index] - cdf_[index - 1];
}

double DiscreteSampler::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < cdf_.size(); ++i) {
    m += static_cast<double>(value(i)) * probability(i);
  }
  return m;
}

std::vector<double> power_law_weights(double gamma, std::int64_t count) {
  std::vector<double> w(static_cast<std::size_t>(count));
  for (std::int64_t k = 1; k <= count; ++k) {
    w[static_cast<std::size_t>(k - 1)] = std::pow(static_cast<double>(k), -gamma);
  }
  return w;
}

DiscreteSampler make_power_law(double gamma, std::int64_t v_max) {
  if (!(gamma > 1.0)) throw ConfigError("power-law exponent must exceed 1");
  if (v_max < 1) throw ConfigError("power-law maximum must be at least 1");
  return DiscreteSampler(power_law_weights(gamma, v_max));
}

std::int64_t sample_power_law(double gamma, std::int64_t v_max, Rng& rng) {
  // Rebuilding the table per draw is wasteful; keep the last one per thread.
  thread_local double cached_gamma = 0.0;
  thread_local std::int64_t cached_max = 0;
  thread_local DiscreteSampler cached;
  if (gamma != cached_gamma || v_max != cached_max) {
    cached = make_power_law(gamma, v_max);
    cached_gamma = gamma;
    cached_max = v_max;
  }
  return cached(rng);
}

void validate(const VolumeModel& model) {
  if (const auto* p = std::get_if<PowerLaw>(&model)) {
    if (!(p->gamma > 1.0)) throw ConfigError("volume exponent must exceed 1");
    if (p->v_max < 1) throw ConfigError("volume maximum must be at least 1");
    return;
  }
  const auto& m = std::get<RoundLotMixture>(model);
  for (const double g : {m.gamma1, m.gamma10, m.gamma100}) {
    if (!(g > 1.0)) throw ConfigError("mixture exponents must exceed 1");
  }
  for (const double w : {m.w1, m.w10, m.w100}) {
    if (!(w >= 0.0)) throw ConfigError("mixture weights must be nonnegative");
  }
  if (std::abs(m.w1 + m.w10 + m.w100 - 1.0) > 1e-9) throw ConfigError("mixture weights must sum to 1");
  if (m.v_max < 1) throw ConfigError("volume maximum must be at least 1");
  if (m.w10 > 0.0 && m.v_max < 10) throw ConfigError("mixture with round lots of 10 needs v_max >= 10");
  if (m.w100 > 0.0 && m.v_max < 100) throw ConfigError("mixture with round lots of 100 needs v_max >= 100");
}

void validate(const LevelModel& model) {
  if (!(model.exponent > 1.0)) throw ConfigError("level exponent must exceed 1");
  if (model.max_level < 1) throw ConfigError("max level must be at least 1");
  if (model.head_cut < 1 || model.head_cut > model.max_level) {
    throw ConfigError("level head cut must lie in [1, max_level]");
  }
}

std::int64_t max_volume(const VolumeModel& model) {
  return std::visit([](const auto& m) { return m.v_max; }, model);
}

VolumeSampler::VolumeSampler(const VolumeModel& model) {
  validate(model);
  if (const auto* p = std::get_if<PowerLaw>(&model)) {
    weights_ = {1.0};
    parts_.push_back(make_power_law(p->gamma, p->v_max));
  } else {
    const auto& m = std::get<RoundLotMixture>(model);
    const std::int64_t lots[] = {1, 10, 100};
    const double weights[] = {m.w1, m.w10, m.w100};
    const double gammas[] = {m.gamma1, m.gamma10, m.gamma100};
    for (int c = 0; c < 3; ++c) {
      const auto count = m.v_max / lots[c];
      if (weights[c] <= 0.0 || count < 1) continue;
      weights_.push_back(weights[c]);
      parts_.emplace_back(power_law_weights(gammas[c], count), lots[c], lots[c]);
    }
  }
  chooser_ = DiscreteSampler(weights_, 0, 1);
}

std::int64_t VolumeSampler::operator()(Rng& rng) const {
  if (parts_.size() == 1) return parts_.front()(rng);
  return parts_[static_cast<std::size_t>(chooser_(rng))](rng);
}

double VolumeSampler::mean() const {
  double m = 0.0;
  for (std::size_t c = 0; c < parts_.size(); ++c) m += chooser_.probability(c) * parts_[c].mean();
  return m;
}

std::vector<double> VolumeSampler::pmf() const {
  std::int64_t top = 0;
  for (const auto& p : parts_) top = std::max(top, p.value(p.size() - 1));
  std::vector<double> out(static_cast<std::size_t>(top), 0.0);
  for (std::size_t c = 0; c < parts_.size(); ++c) {
    for (std::size_t i = 0; i < parts_[c].size(); ++i) {
      out[static_cast<std::size_t>(parts_[c].value(i) - 1)] += chooser_.probability(c) * parts_[c].probability(i);
    }
  }
  return out;
}

LevelSampler::LevelSampler(const LevelModel& model) {
  validate(model);
  std::vector<double> w(static_cast<std::size_t>(model.max_level));
  for (int l = 1; l <= model.max_level; ++l) {
    w[static_cast<std::size_t>(l - 1)] =
        l <= model.head_cut ? 1.0 : std::pow(static_cast<double>(l) / model.head_cut, -model.exponent);
  }
  sampler_ = DiscreteSampler(w);
}

}  // namespace cob
