#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "cob/sim.hpp"

namespace cob {

/// Input too small or degenerate for the requested statistic.
class StatsError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  double intercept_se = 0.0;
  double r2 = 0.0;
  std::size_t n = 0;
};

/// Ordinary (or weighted, when `weights` is nonempty) least squares of y on
/// x. Standard errors come from the residual scatter. Needs n >= 3.
LinearFit least_squares(std::span<const double> x, std::span<const double> y,
                        std::span<const double> weights = {});

struct ProfileStats {
  int window = 0;
  std::size_t snapshots = 0;
  /// Mean signed volume per slot, layout of Book::profile_snapshot.
  std::vector<double> mean;
  /// Snapshots in which the slot held volume; zero marks a slot with no data.
  std::vector<std::uint64_t> occupied;

  /// Mean of |bid level l| and |ask level l|, l in 1..window.
  double mean_abs(int level) const;
  double mean_bid(int level) const;
  double mean_ask(int level) const;  // positive magnitude
};

ProfileStats average_profile(std::span<const std::vector<Volume>> snapshots, int window);
ProfileStats average_profile(std::span<const ProfileSnapshot> snapshots, int window);

/// Regression of mean |volume| on level number over [first, last].
LinearFit profile_slope(const ProfileStats& profile, int first, int last);

struct SpreadSample {
  Volume volume = 0;
  std::int64_t spread_after = 0;
};

/// Fit of log(spread after execution) = beta * log(volume) + c.
struct SpreadResponse {
  std::vector<SpreadSample> samples;
  double beta = 0.0;
  double intercept = 0.0;
  double beta_se = 0.0;
  double r2 = 0.0;
  /// Trades entering the regression.
  std::size_t points = 0;
};

inline constexpr std::size_t kMinSpreadSamples = 30;

/// Uses fully filled trades with a defined post-trade spread. Refuses
/// (StatsError) with fewer than 30 such trades or a volume range under one
/// decade.
SpreadResponse spread_response(std::span<const TradeRecord> trades);
SpreadResponse spread_response(std::span<const SpreadSample> samples);

struct PowerLawFit {
  double ols_exponent = 0.0;
  double ols_se = 0.0;
  double ols_r2 = 0.0;
  double mle_exponent = 0.0;
  double mle_se = 0.0;
  std::int64_t tail_cutoff = 1;
  std::int64_t support_max = 1;
  double tail_weight = 0.0;
  /// Exponent at or below 1, or a log-log fit that explains little.
  bool poor = false;
};

inline constexpr std::int64_t kDefaultTailCutoff = 10;
inline constexpr double kMinTailWeight = 1000.0;
inline constexpr double kMinFitCount = 20.0;

/// Tail fit on values >= tail_cutoff of a weighted histogram (value -> weight).
///
/// The log-log estimate is a weighted least-squares line through log
/// frequency per value, weighted by each value's count. It runs from the
/// cutoff up to the first value seen fewer than kMinFitCount times. The maximum-likelihood estimate treats the tail
/// as a discrete power law truncated to [tail_cutoff, support_max], with
/// support_max defaulting to the largest observed value. Refuses with fewer
/// than 1000 units of tail weight.
PowerLawFit fit_power_law(const std::map<std::int64_t, double>& histogram,
                          std::int64_t tail_cutoff = kDefaultTailCutoff,
                          std::optional<std::int64_t> support_max = std::nullopt);
PowerLawFit fit_power_law(std::span<const std::int64_t> samples,
                          std::int64_t tail_cutoff = kDefaultTailCutoff,
                          std::optional<std::int64_t> support_max = std::nullopt);

struct DriftStats {
  std::size_t increments = 0;
  double mean = 0.0;           // ticks per second
  double se_plain = 0.0;
  double se_batched = 0.0;
  std::size_t batches = 0;
  double t_stat = 0.0;         // mean / se_batched
  double monotone_fraction = 0.0;  // share of increments >= 0
};

inline constexpr std::size_t kDriftBatches = 30;
inline constexpr std::size_t kMinDriftSeconds = 100;

/// Per-second mid-price increments. Seconds where either side is empty are
/// skipped together with the increments touching them.
DriftStats drift_stats(std::span<const SeriesRow> series);
DriftStats drift_stats(std::span<const double> mid);

/// Two-sided Student-t critical value at the given level for `dof` degrees
/// of freedom.
double student_t_critical(double alpha, std::size_t dof);

struct HistogramBin {
  double lower = 0.0;
  double upper = 0.0;  // +inf for the last bin
  std::uint64_t count = 0;
};

struct InterArrival {
  std::vector<double> gaps;  // seconds
  double mean = 0.0;
  double standard_error = 0.0;
  std::vector<HistogramBin> histogram;
};

struct SeriesTables {
  std::vector<SeriesRow> rows;
  InterArrival market;
  InterArrival limit;
};

/// Per-second depth and price columns plus inter-arrival distributions of
/// main-phase market and limit events.
SeriesTables series_extract(const RunOutput& run);
InterArrival inter_arrival(std::span<const std::int64_t> times_us, std::size_t bins = 50);

/// Mean and standard error of cancelled volumes over main-phase events.
CancelVolumeTracker cancelled_volumes(std::span<const SimEvent> events);

}  // namespace cob
