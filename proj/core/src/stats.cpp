#include "cob/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

namespace cob {

LinearFit least_squares(std::span<const double> x, std::span<const double> y, std::span<const double> weights) {
  const std::size_t n = x.size();
  if (y.size() != n || (!weights.empty() && weights.size() != n)) {
    throw StatsError("least squares: mismatched input lengths");
  }
  if (n < 3) throw StatsError("least squares needs at least 3 points");
  auto w = [&](std::size_t i) { return weights.empty() ? 1.0 : weights[i]; };

  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sw += w(i);
    sx += w(i) * x[i];
    sy += w(i) * y[i];
  }
  if (!(sw > 0.0)) throw StatsError("least squares: zero total weight");
  const double mx = sx / sw, my = sy / sw;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += w(i) * dx * dx;
    sxy += w(i) * dx * dy;
    syy += w(i) * dy * dy;
  }
  if (!(sxx > 0.0)) throw StatsError("least squares: x has no spread");

  LinearFit fit;
  fit.n = n;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    rss += w(i) * r * r;
  }
  fit.r2 = syy > 0.0 ? 1.0 - rss / syy : 1.0;
  // Weights act as frequency weights when they do not sum to n.
  const double dof = (weights.empty() ? static_cast<double>(n) : sw) - 2.0;
  const double sigma2 = dof > 0.0 ? rss / dof : 0.0;
  fit.slope_se = std::sqrt(sigma2 / sxx);
  fit.intercept_se = std::sqrt(sigma2 * (1.0 / sw + mx * mx / sxx));
  return fit;
}

// ---------------------------------------------------------------- profile

double ProfileStats::mean_bid(int level) const { return mean[static_cast<std::size_t>(window - level)]; }
double ProfileStats::mean_ask(int level) const { return -mean[static_cast<std::size_t>(window + level - 1)]; }
double ProfileStats::mean_abs(int level) const {
  return 0.5 * (std::abs(mean_bid(level)) + std::abs(mean_ask(level)));
}

ProfileStats average_profile(std::span<const std::vector<Volume>> snapshots, int window) {
  if (snapshots.empty()) throw StatsError("average_profile: no snapshots");
  if (window < 1) throw StatsError("average_profile: window must be positive");
  const auto width = 2 * static_cast<std::size_t>(window);
  ProfileStats p;
  p.window = window;
  p.snapshots = snapshots.size();
  p.mean.assign(width, 0.0);
  p.occupied.assign(width, 0);
  for (const auto& x : snapshots) {
    if (x.size() != width) throw StatsError("average_profile: snapshot width does not match window");
    for (std::size_t i = 0; i < width; ++i) {
      p.mean[i] += static_cast<double>(x[i]);
      if (x[i] != 0) ++p.occupied[i];
    }
  }
  for (auto& m : p.mean) m /= static_cast<double>(snapshots.size());
  return p;
}

ProfileStats average_profile(std::span<const ProfileSnapshot> snapshots, int window) {
  std::vector<std::vector<Volume>> xs;
  xs.reserve(snapshots.size());
  for (const auto& s : snapshots) xs.push_back(s.x);
  return average_profile(std::span<const std::vector<Volume>>(xs), window);
}

LinearFit profile_slope(const ProfileStats& profile, int first, int last) {
  if (first < 1 || last > profile.window || last - first < 2) {
    throw StatsError("profile_slope: level range outside the profile window");
  }
  std::vector<double> x, y;
  for (int l = first; l <= last; ++l) {
    x.push_back(l);
    y.push_back(profile.mean_abs(l));
  }
  return least_squares(x, y);
}

// ---------------------------------------------------------- spread response

SpreadResponse spread_response(std::span<const TradeRecord> trades) {
  std::vector<SpreadSample> samples;
  for (const auto& t : trades) {
    if (t.unfilled != 0 || !t.spread_after || t.filled < 1) continue;
    samples.push_back(SpreadSample{t.volume, *t.spread_after});
  }
  return spread_response(std::span<const SpreadSample>(samples));
}

SpreadResponse spread_response(std::span<const SpreadSample> samples) {
  SpreadResponse r;
  r.samples.assign(samples.begin(), samples.end());
  if (r.samples.size() < kMinSpreadSamples) {
    throw StatsError("spread_response: need at least 30 fully filled trades, got " +
                     std::to_string(r.samples.size()));
  }
  Volume lo = std::numeric_limits<Volume>::max(), hi = 0;
  for (const auto& s : r.samples) {
    if (s.volume < 1 || s.spread_after < 1) throw StatsError("spread_response: volumes and spreads must be >= 1");
    lo = std::min(lo, s.volume);
    hi = std::max(hi, s.volume);
  }
  if (hi < 10 * lo) {
    throw StatsError("spread_response: volumes span " + std::to_string(lo) + ".." + std::to_string(hi) +
                     ", less than one decade");
  }
  std::vector<double> x, y;
  for (const auto& s : r.samples) {
    x.push_back(std::log(static_cast<double>(s.volume)));
    y.push_back(std::log(static_cast<double>(s.spread_after)));
  }
  const auto fit = least_squares(x, y);
  r.beta = fit.slope;
  r.intercept = fit.intercept;
  r.beta_se = fit.slope_se;
  r.r2 = fit.r2;
  r.points = fit.n;
  return r;
}

// ---------------------------------------------------------------- power law

namespace {

// Mean and variance of log v under v^-gamma on [lo, hi].
std::pair<double, double> log_moments(double gamma, std::int64_t lo, std::int64_t hi) {
  // Weights relative to the first term keep large exponents finite.
  double z = 0.0, m1 = 0.0, m2 = 0.0;
  const double l0 = std::log(static_cast<double>(lo));
  for (std::int64_t v = lo; v <= hi; ++v) {
    const double lv = std::log(static_cast<double>(v));
    const double w = std::exp(-gamma * (lv - l0));
    z += w;
    m1 += w * lv;
    m2 += w * lv * lv;
  }
  const double mean = m1 / z;
  return {mean, std::max(0.0, m2 / z - mean * mean)};
}

}  // namespace

PowerLawFit fit_power_law(const std::map<std::int64_t, double>& histogram, std::int64_t tail_cutoff,
                          std::optional<std::int64_t> support_max) {
  if (tail_cutoff < 1) throw StatsError("fit_power_law: tail cutoff must be >= 1");
  PowerLawFit fit;
  fit.tail_cutoff = tail_cutoff;

  std::vector<double> x, y, w;
  double total = 0.0, sum_log = 0.0;
  std::int64_t top = tail_cutoff;
  for (const auto& [v, count] : histogram) {
    if (v < tail_cutoff || !(count > 0.0)) continue;
    total += count;
    sum_log += count * std::log(static_cast<double>(v));
    top = std::max(top, v);
  }
  fit.tail_weight = total;
  if (total < kMinTailWeight) {
    throw StatsError("fit_power_law: tail weight " + std::to_string(total) + " above cutoff " +
                     std::to_string(tail_cutoff) + " is below 1000");
  }
  // Sparse values carry a downward bias in log count (and zero counts drop
  // out entirely), so the line stops at the first thinly observed value.
  for (const auto& [v, count] : histogram) {
    if (v < tail_cutoff || !(count > 0.0)) continue;
    if (count < kMinFitCount) break;
    x.push_back(std::log(static_cast<double>(v)));
    y.push_back(std::log(count / total));
    w.push_back(count);
  }
  fit.support_max = support_max.value_or(top);
  if (fit.support_max < top) throw StatsError("fit_power_law: support maximum below observed values");

  if (x.size() >= 3) {
    const auto ls = least_squares(x, y, w);
    fit.ols_exponent = -ls.slope;
    fit.ols_se = ls.slope_se;
    fit.ols_r2 = ls.r2;
  } else {
    fit.ols_r2 = 0.0;
  }

  if (fit.support_max > tail_cutoff) {
    // E_gamma[log v] decreases in gamma; match it to the sample mean.
    const double target = sum_log / total;
    double lo = -20.0, hi = 20.0;
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (log_moments(mid, tail_cutoff, fit.support_max).first > target) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    fit.mle_exponent = 0.5 * (lo + hi);
    const double var = log_moments(fit.mle_exponent, tail_cutoff, fit.support_max).second;
    fit.mle_se = var > 0.0 ? 1.0 / std::sqrt(total * var) : std::numeric_limits<double>::infinity();
  }
  fit.poor = fit.ols_exponent <= 1.0 || fit.mle_exponent <= 1.0 || fit.ols_r2 < 0.5;
  return fit;
}

PowerLawFit fit_power_law(std::span<const std::int64_t> samples, std::int64_t tail_cutoff,
                          std::optional<std::int64_t> support_max) {
  std::map<std::int64_t, double> hist;
  for (const auto v : samples) hist[v] += 1.0;
  return fit_power_law(hist, tail_cutoff, support_max);
}

// -------------------------------------------------------------------- drift

double student_t_critical(double alpha, std::size_t dof) {
  if (dof == 0) throw StatsError("student_t_critical: zero degrees of freedom");
  const boost::math::students_t dist(static_cast<double>(dof));
  return boost::math::quantile(boost::math::complement(dist, alpha / 2.0));
}

DriftStats drift_stats(std::span<const double> mid) {
  if (mid.size() < kMinDriftSeconds + 1) {
    throw StatsError("drift_stats: need at least 100 post-warmup seconds, got " + std::to_string(mid.size()));
  }
  std::vector<double> inc;
  inc.reserve(mid.size() - 1);
  for (std::size_t i = 1; i < mid.size(); ++i) {
    if (std::isnan(mid[i]) || std::isnan(mid[i - 1])) continue;
    inc.push_back(mid[i] - mid[i - 1]);
  }
  if (inc.size() < kMinDriftSeconds) {
    throw StatsError("drift_stats: fewer than 100 usable increments");
  }
  DriftStats d;
  d.increments = inc.size();
  const double n = static_cast<double>(inc.size());
  d.mean = std::accumulate(inc.begin(), inc.end(), 0.0) / n;
  double ss = 0.0;
  std::size_t nonneg = 0;
  for (const double v : inc) {
    ss += (v - d.mean) * (v - d.mean);
    if (v >= 0.0) ++nonneg;
  }
  d.se_plain = std::sqrt(ss / (n - 1.0) / n);
  d.monotone_fraction = static_cast<double>(nonneg) / n;

  // Batched means: equal consecutive batches, leftovers dropped from the
  // front so the most recent data is always used.
  d.batches = kDriftBatches;
  const std::size_t per = inc.size() / d.batches;
  const std::size_t skip = inc.size() - per * d.batches;
  std::vector<double> means(d.batches, 0.0);
  for (std::size_t b = 0; b < d.batches; ++b) {
    for (std::size_t i = 0; i < per; ++i) means[b] += inc[skip + b * per + i];
    means[b] /= static_cast<double>(per);
  }
  const double grand = std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(d.batches);
  double bss = 0.0;
  for (const double m : means) bss += (m - grand) * (m - grand);
  d.se_batched = std::sqrt(bss / static_cast<double>(d.batches - 1) / static_cast<double>(d.batches));
  d.t_stat = d.se_batched > 0.0 ? d.mean / d.se_batched : 0.0;
  return d;
}

DriftStats drift_stats(std::span<const SeriesRow> series) {
  std::vector<double> mid;
  mid.reserve(series.size());
  for (const auto& row : series) {
    const auto m2 = row.mid2();
    mid.push_back(m2 ? static_cast<double>(*m2) / 2.0 : std::numeric_limits<double>::quiet_NaN());
  }
  return drift_stats(std::span<const double>(mid));
}

// ------------------------------------------------------------- inter-arrival

InterArrival inter_arrival(std::span<const std::int64_t> times_us, std::size_t bins) {
  InterArrival ia;
  for (std::size_t i = 1; i < times_us.size(); ++i) {
    ia.gaps.push_back(static_cast<double>(times_us[i] - times_us[i - 1]) / static_cast<double>(kMicrosPerSecond));
  }
  if (ia.gaps.empty()) return ia;
  const double n = static_cast<double>(ia.gaps.size());
  ia.mean = std::accumulate(ia.gaps.begin(), ia.gaps.end(), 0.0) / n;
  double ss = 0.0;
  for (const double g : ia.gaps) ss += (g - ia.mean) * (g - ia.mean);
  ia.standard_error = ia.gaps.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  if (bins == 0) return ia;
  // Bins cover five means; the last bin is open-ended.
  const double width = ia.mean > 0.0 ? 5.0 * ia.mean / static_cast<double>(bins) : 1.0;
  ia.histogram.resize(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    ia.histogram[b].lower = width * static_cast<double>(b);
    ia.histogram[b].upper = b + 1 == bins ? std::numeric_limits<double>::infinity() : width * static_cast<double>(b + 1);
  }
  for (const double g : ia.gaps) {
    auto b = static_cast<std::size_t>(g / width);
    ++ia.histogram[std::min(b, bins - 1)].count;
  }
  return ia;
}

SeriesTables series_extract(const RunOutput& run) {
  SeriesTables t;
  t.rows = run.series;
  std::vector<std::int64_t> market, limit;
  for (const auto& ev : run.events) {
    if (ev.phase != Phase::Main) continue;
    if (is_market(ev.kind)) market.push_back(ev.t_us);
    if (is_limit(ev.kind)) limit.push_back(ev.t_us);
  }
  t.market = inter_arrival(market);
  t.limit = inter_arrival(limit);
  return t;
}

CancelVolumeTracker cancelled_volumes(std::span<const SimEvent> events) {
  CancelVolumeTracker tracker;
  for (const auto& ev : events) {
    if (ev.phase == Phase::Main && is_cancel(ev.kind) && !ev.gated) tracker.add(ev.volume);
  }
  return tracker;
}

}  // namespace cob
