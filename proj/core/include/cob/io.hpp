#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cob/sim.hpp"

namespace cob {

std::string_view version() noexcept;

/// Malformed or missing run data. Messages name the file and line.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// I/O failure writing or reading run files.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File names inside a run directory.
namespace files {
inline constexpr std::string_view kEvents = "events.ndjson";
inline constexpr std::string_view kTrades = "trades.csv";
inline constexpr std::string_view kSeries = "series.csv";
inline constexpr std::string_view kProfiles = "profiles.csv";
inline constexpr std::string_view kManifest = "manifest.cfg";
}  // namespace files

/// `# cob <version> seed=<seed> preset=<name>` provenance line.
std::string header_line(const SimConfig& config);

/// Microseconds as seconds with exactly six decimals.
std::string format_time(std::int64_t t_us);

/// One JSON object per event, fixed key order:
/// index, t, phase, kind, side, level, volume, order_id, price, price_tick,
/// fills [{price_tick, volume, maker}], unfilled, spread_after, gated, gates.
/// `price` is in money units, `price_tick` on the integer grid.
void write_event(std::ostream& out, const SimEvent& ev, double tick);
void write_events(std::ostream& out, const RunOutput& run);

/// t,side,volume,filled,unfilled,spread_after,first_price,last_price,fills
void write_trades(std::ostream& out, const RunOutput& run);

/// second,mid,best_bid,best_ask,spread,s_total,d_total,s_100,d_100
/// Prices in money units; spread in ticks; empty cells when a side is empty.
void write_series(std::ostream& out, const RunOutput& run);

/// Long format t,level,volume. Each snapshot starts with a `t,0,0` marker
/// row followed by its nonzero slots: level < 0 below the mid (bids,
/// positive volume), level > 0 above it (asks, negative volume).
void write_profiles(std::ostream& out, const RunOutput& run);

/// Configuration echo (loadable by load_config) followed by run facts as
/// comment lines.
void write_manifest(std::ostream& out, const RunOutput& run);

/// Writes the five run files into `dir`, creating it if needed.
void write_run(const std::filesystem::path& dir, const RunOutput& run);

/// Runs the simulation and writes its files into `dir`, streaming the
/// event log instead of holding it in memory. The returned run has no events.
RunOutput run_to_directory(const std::filesystem::path& dir, const SimConfig& config);

/// Reads a run directory back. Per-event and per-row data are restored
/// exactly; `cancelled` is recomputed from the event log.
RunOutput load_run(const std::filesystem::path& dir);

std::vector<SimEvent> read_events(std::istream& in, std::string_view source);

}  // namespace cob
