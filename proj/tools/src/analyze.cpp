#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "cob/cli.hpp"
#include "cob/config.hpp"
#include "cob/io.hpp"
#include "cob/stats.hpp"

namespace cob::cli {
namespace {

using Histogram = std::map<std::int64_t, double>;

struct PowerLawInput {
  std::string name;
  Histogram histogram;
  std::int64_t support_max = 1;
};

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  return format_double(v);
}

std::string fixed(double v, int decimals) { return std::isfinite(v) ? format_fixed(v, decimals) : num(v); }

std::ofstream open_table(const std::filesystem::path& path, std::string_view header) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError(path.string() + ": cannot open for writing");
  f << header << '\n';
  return f;
}

void close_table(std::ofstream& f, const std::filesystem::path& path) {
  f.flush();
  if (!f) throw IoError(path.string() + ": write failed");
}

}  // namespace

std::vector<std::filesystem::path> discover_runs(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(path)) throw DataError(path.string() + ": not a directory");
  if (fs::exists(path / files::kManifest)) return {path};
  std::vector<fs::path> runs;
  for (const auto& entry : fs::directory_iterator(path)) {
    if (entry.is_directory() && fs::exists(entry.path() / files::kManifest)) runs.push_back(entry.path());
  }
  if (runs.empty()) throw DataError(path.string() + ": no run directories found");
  std::sort(runs.begin(), runs.end());
  return runs;
}

std::string analyze(const std::vector<std::filesystem::path>& runs, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError(out_dir.string() + ": cannot create directory: " + ec.message());

  int window = 0;
  std::size_t snapshots = 0;
  std::vector<double> profile_sum;
  std::vector<std::uint64_t> profile_occupied;
  std::vector<SpreadSample> spread_pooled;
  std::vector<double> market_gaps, limit_gaps;
  PowerLawInput limit_volume{"limit_volume", {}, 1}, market_volume{"market_volume", {}, 1},
      limit_level{"limit_level", {}, 1}, cancel_volume{"cancel_volume", {}, 1};
  double limit_rate = 0.0, market_rate = 0.0;

  const auto spread_path = out_dir / "spread_response.csv";
  const auto fit_path = out_dir / "spread_fit.csv";
  const auto drift_path = out_dir / "drift.csv";
  auto spread_csv = open_table(spread_path, "run,volume,spread_after");
  auto fit_csv = open_table(fit_path, "run,trades,beta,beta_se,ci_low,ci_high,intercept,r2,status");
  auto drift_csv = open_table(drift_path,
                              "run,seed,increments,mean,se_plain,se_batched,t_stat,t_critical,rejects_zero,"
                              "monotone_fraction,status");

  struct DriftRow {
    std::string run;
    DriftStats stats;
    bool rejects = false;
  };
  std::vector<DriftRow> drifts;
  std::ostringstream notes;

  auto write_fit = [&](const std::string& label, std::span<const SpreadSample> samples) {
    try {
      const auto r = spread_response(samples);
      const double t = student_t_critical(0.05, r.points - 2);
      fit_csv << label << ',' << r.points << ',' << num(r.beta) << ',' << num(r.beta_se) << ','
              << num(r.beta - t * r.beta_se) << ',' << num(r.beta + t * r.beta_se) << ',' << num(r.intercept)
              << ',' << num(r.r2) << ",ok\n";
      return std::optional<SpreadResponse>(r);
    } catch (const StatsError& e) {
      fit_csv << label << ',' << samples.size() << ",,,,,,,\"" << e.what() << "\"\n";
      return std::optional<SpreadResponse>();
    }
  };

  for (const auto& dir : runs) {
    const auto run = load_run(dir);
    const auto label = dir.filename().string();
    limit_rate = run.config.rates.limit_bid + run.config.rates.limit_ask;
    market_rate = run.config.rates.market_bid + run.config.rates.market_ask;

    if (!run.profiles.empty()) {
      const auto p = average_profile(std::span<const ProfileSnapshot>(run.profiles), run.config.profile_window);
      if (window == 0) {
        window = p.window;
        profile_sum.assign(p.mean.size(), 0.0);
        profile_occupied.assign(p.mean.size(), 0);
      }
      if (p.window != window) throw DataError(dir.string() + ": profile window differs from the other runs");
      for (std::size_t i = 0; i < p.mean.size(); ++i) {
        profile_sum[i] += p.mean[i] * static_cast<double>(p.snapshots);
        profile_occupied[i] += p.occupied[i];
      }
      snapshots += p.snapshots;
    }

    std::vector<SpreadSample> samples;
    for (const auto& t : run.trades) {
      if (t.unfilled == 0 && t.filled >= 1 && t.spread_after) samples.push_back({t.volume, *t.spread_after});
    }
    for (const auto& s : samples) spread_csv << label << ',' << s.volume << ',' << s.spread_after << '\n';
    write_fit(label, samples);
    spread_pooled.insert(spread_pooled.end(), samples.begin(), samples.end());

    try {
      const auto d = drift_stats(std::span<const SeriesRow>(run.series));
      const double tc = student_t_critical(0.05, d.batches - 1);
      const bool rejects = std::abs(d.t_stat) > tc;
      drift_csv << label << ',' << run.config.seed << ',' << d.increments << ',' << num(d.mean) << ','
                << num(d.se_plain) << ',' << num(d.se_batched) << ',' << num(d.t_stat) << ',' << num(tc) << ','
                << (rejects ? 1 : 0) << ',' << num(d.monotone_fraction) << ",ok\n";
      drifts.push_back({label, d, rejects});
    } catch (const StatsError& e) {
      drift_csv << label << ',' << run.config.seed << ",,,,,,,,,\"" << e.what() << "\"\n";
    }

    const auto tables = series_extract(run);
    market_gaps.insert(market_gaps.end(), tables.market.gaps.begin(), tables.market.gaps.end());
    limit_gaps.insert(limit_gaps.end(), tables.limit.gaps.begin(), tables.limit.gaps.end());

    limit_volume.support_max = std::max(limit_volume.support_max, max_volume(run.config.volume_model_limit));
    market_volume.support_max = std::max(market_volume.support_max, max_volume(run.config.volume_model_market));
    limit_level.support_max = std::max<std::int64_t>(limit_level.support_max, run.config.level_model.max_level);
    cancel_volume.support_max = limit_volume.support_max;
    for (const auto& ev : run.events) {
      if (ev.phase != Phase::Main) continue;
      if (is_limit(ev.kind)) {
        limit_volume.histogram[ev.volume] += 1.0;
        limit_level.histogram[ev.level] += 1.0;
      } else if (is_market(ev.kind)) {
        market_volume.histogram[ev.volume] += 1.0;
      } else if (!ev.gated) {
        cancel_volume.histogram[ev.volume] += 1.0;
      }
    }
  }
  close_table(spread_csv, spread_path);
  const auto pooled_fit = runs.size() > 1 ? write_fit("pooled", spread_pooled) : std::nullopt;
  std::optional<SpreadResponse> single_fit;
  if (runs.size() == 1) {
    try {
      single_fit = spread_response(std::span<const SpreadSample>(spread_pooled));
    } catch (const StatsError&) {
    }
  }
  const auto& fit = runs.size() > 1 ? pooled_fit : single_fit;
  close_table(fit_csv, fit_path);

  // Pooled drift: mean of per-run means with the combined batched error.
  double pooled_mean = 0.0, pooled_se = 0.0;
  std::size_t positive = 0, rejecting = 0, monotone = 0;
  for (const auto& d : drifts) {
    pooled_mean += d.stats.mean;
    pooled_se += d.stats.se_batched * d.stats.se_batched;
    if (d.stats.mean > 0.0) ++positive;
    if (d.rejects) ++rejecting;
    if (d.stats.monotone_fraction > 0.6) ++monotone;
  }
  if (!drifts.empty()) {
    pooled_mean /= static_cast<double>(drifts.size());
    pooled_se = std::sqrt(pooled_se) / static_cast<double>(drifts.size());
    drift_csv << "pooled,," << drifts.size() << ',' << num(pooled_mean) << ",," << num(pooled_se) << ','
              << num(pooled_se > 0 ? pooled_mean / pooled_se : 0.0) << ",,,,ok\n";
  }
  close_table(drift_csv, drift_path);

  // Profile.
  const auto profile_path = out_dir / "profile.csv";
  auto profile_csv = open_table(profile_path, "level,mean_bid,mean_ask,mean_abs,occupied_bid,occupied_ask");
  std::optional<ProfileStats> profile;
  if (snapshots > 0) {
    ProfileStats p;
    p.window = window;
    p.snapshots = snapshots;
    p.occupied = profile_occupied;
    for (const double s : profile_sum) p.mean.push_back(s / static_cast<double>(snapshots));
    for (int l = 1; l <= window; ++l) {
      profile_csv << l << ',' << num(p.mean_bid(l)) << ',' << num(p.mean_ask(l)) << ',' << num(p.mean_abs(l)) << ','
                  << p.occupied[static_cast<std::size_t>(window - l)] << ','
                  << p.occupied[static_cast<std::size_t>(window + l - 1)] << '\n';
    }
    profile = std::move(p);
  }
  close_table(profile_csv, profile_path);

  // Power-law fits.
  const auto power_path = out_dir / "power_law_fit.csv";
  auto power_csv = open_table(power_path,
                              "quantity,tail_cutoff,support_max,tail_weight,ols_exponent,ols_se,ols_r2,"
                              "mle_exponent,mle_se,poor,status");
  std::vector<std::pair<std::string, std::optional<PowerLawFit>>> power_fits;
  for (auto* input : {&limit_volume, &market_volume, &limit_level, &cancel_volume}) {
    try {
      const auto f = fit_power_law(input->histogram, kDefaultTailCutoff, input->support_max);
      power_csv << input->name << ',' << f.tail_cutoff << ',' << f.support_max << ',' << num(f.tail_weight) << ','
                << num(f.ols_exponent) << ',' << num(f.ols_se) << ',' << num(f.ols_r2) << ','
                << num(f.mle_exponent) << ',' << num(f.mle_se) << ',' << (f.poor ? 1 : 0) << ",ok\n";
      power_fits.emplace_back(input->name, f);
    } catch (const StatsError& e) {
      power_csv << input->name << ',' << kDefaultTailCutoff << ",,,,,,,,,\"" << e.what() << "\"\n";
      power_fits.emplace_back(input->name, std::nullopt);
    }
  }
  close_table(power_csv, power_path);

  // Inter-arrival histograms, pooled over runs by chaining the gaps.
  const auto ia_path = out_dir / "inter_arrival.csv";
  auto ia_csv = open_table(ia_path, "stream,lower,upper,count");
  auto pooled_ia = [](const std::vector<double>& gaps) {
    std::vector<std::int64_t> times{0};
    for (const double g : gaps) times.push_back(times.back() + std::llround(g * static_cast<double>(kMicrosPerSecond)));
    return inter_arrival(times);
  };
  const auto market_ia = pooled_ia(market_gaps);
  const auto limit_ia = pooled_ia(limit_gaps);
  for (const auto& [name, ia] : {std::pair<std::string, const InterArrival*>{"market", &market_ia},
                                 std::pair<std::string, const InterArrival*>{"limit", &limit_ia}}) {
    for (const auto& b : ia->histogram) {
      ia_csv << name << ',' << num(b.lower) << ',' << num(b.upper) << ',' << b.count << '\n';
    }
  }
  close_table(ia_csv, ia_path);

  // Summary.
  std::ostringstream s;
  s << "cob " << version() << " analysis of " << runs.size() << " run" << (runs.size() == 1 ? "" : "s") << '\n';
  s << "output: " << out_dir.string() << "\n\n";

  s << "[profile.csv] averaged book profile around the mid price (book profile figures)\n";
  if (profile) {
    s << "  snapshots: " << profile->snapshots << ", window " << profile->window << " levels\n";
    const int tail_last = std::min(500, profile->window);
    try {
      const auto flat = profile_slope(*profile, 20, tail_last);
      s << "  slope of mean |volume| over levels 20.." << tail_last << ": " << fixed(flat.slope, 5) << " +/- "
        << fixed(flat.slope_se, 5) << " (t = " << fixed(flat.slope_se > 0 ? flat.slope / flat.slope_se : 0.0, 2)
        << ")\n";
    } catch (const StatsError& e) {
      s << "  tail slope: n/a (" << e.what() << ")\n";
    }
    try {
      const auto head = profile_slope(*profile, 1, std::min(10, profile->window));
      s << "  slope over levels 1.." << std::min(10, profile->window) << ": " << fixed(head.slope, 4) << " +/- "
        << fixed(head.slope_se, 4) << ", R^2 " << fixed(head.r2, 3) << '\n';
    } catch (const StatsError& e) {
      s << "  near-best slope: n/a (" << e.what() << ")\n";
    }
  } else {
    s << "  no profile snapshots\n";
  }

  s << "\n[spread_response.csv, spread_fit.csv] post-trade spread against market order size (spread scaling figure)\n";
  if (fit) {
    const double t = student_t_critical(0.05, fit->points - 2);
    s << "  trades: " << fit->points << ", beta = " << fixed(fit->beta, 4) << " +/- " << fixed(fit->beta_se, 4)
      << ", 95% CI [" << fixed(fit->beta - t * fit->beta_se, 4) << ", " << fixed(fit->beta + t * fit->beta_se, 4)
      << "], R^2 " << fixed(fit->r2, 3) << '\n';
  } else {
    s << "  beta: n/a (" << spread_pooled.size() << " fully filled trades; see spread_fit.csv)\n";
  }

  s << "\n[drift.csv] per-second mid-price drift in ticks (price trajectory figures)\n";
  if (!drifts.empty()) {
    if (drifts.size() == 1) {
      const auto& d = drifts.front().stats;
      s << "  mean " << fixed(d.mean, 5) << " +/- " << fixed(d.se_batched, 5) << " (batched), t = " << fixed(d.t_stat, 2)
        << ", monotone fraction " << fixed(d.monotone_fraction, 3) << '\n';
    } else {
      s << "  runs: " << drifts.size() << ", positive drift in " << positive << ", zero rejected at 5% in "
        << rejecting << ", monotone fraction > 0.6 in " << monotone << '\n';
      s << "  pooled mean " << fixed(pooled_mean, 5) << " +/- " << fixed(pooled_se, 5) << '\n';
    }
  } else {
    s << "  n/a (runs too short; see drift.csv)\n";
  }

  s << "\n[power_law_fit.csv] tail exponents, cutoff " << kDefaultTailCutoff
    << " (order size and level distribution figures)\n";
  for (const auto& [name, f] : power_fits) {
    s << "  " << name << ": ";
    if (f) {
      s << "log-log " << fixed(f->ols_exponent, 3) << " +/- " << fixed(f->ols_se, 3) << ", ML " << fixed(f->mle_exponent, 3)
        << " +/- " << fixed(f->mle_se, 3) << (f->poor ? " (poor fit)" : "") << '\n';
    } else {
      s << "n/a (too few tail samples)\n";
    }
  }

  s << "\n[inter_arrival.csv] waiting times between events (inter-arrival figures)\n";
  auto ia_line = [&](std::string_view name, const InterArrival& ia, double rate) {
    s << "  " << name << ": " << ia.gaps.size() << " gaps";
    if (!ia.gaps.empty()) s << ", mean " << fixed(ia.mean, 6) << " s +/- " << fixed(ia.standard_error, 6);
    if (rate > 0.0) s << " (nominal 1/rate " << fixed(1.0 / rate, 6) << " s)";
    s << '\n';
  };
  ia_line("market", market_ia, market_rate);
  ia_line("limit", limit_ia, limit_rate);

  const auto text = s.str();
  const auto summary_path = out_dir / "summary.txt";
  std::ofstream summary(summary_path, std::ios::binary | std::ios::trunc);
  if (!summary) throw IoError(summary_path.string() + ": cannot open for writing");
  summary << text;
  summary.flush();
  if (!summary) throw IoError(summary_path.string() + ": write failed");
  return text;
}

}  // namespace cob::cli
