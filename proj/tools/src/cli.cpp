#include "cob/cli.hpp"

#include <atomic>
#include <charconv>
#include <mutex>
#include <ostream>
#include <thread>

#include <CLI11.hpp>

#include "cob/book.hpp"
#include "cob/config.hpp"
#include "cob/error.hpp"
#include "cob/io.hpp"
#include "cob/presets.hpp"
#include "cob/sim.hpp"
#include "cob/stats.hpp"

namespace cob::cli {
namespace {

struct ConfigSource {
  std::string preset;
  std::string config_path;
  std::vector<std::string> overrides;

  void add_to(CLI::App& cmd) {
    auto* p = cmd.add_option("--preset", preset, "Built-in preset (see `presets`)");
    auto* c = cmd.add_option("--config", config_path, "Configuration file");
    p->excludes(c);
    c->excludes(p);
    cmd.add_option("--set", overrides, "Override a configuration key: key=value (repeatable)");
  }

  SimConfig load() const {
    if (preset.empty() == config_path.empty()) throw ConfigError("exactly one of --preset or --config is required");
    auto config = preset.empty() ? load_config(config_path) : cob::preset(preset);
    if (!overrides.empty()) config = apply_overrides(config, overrides);
    validate(config);
    return config;
  }
};

struct SeedRange {
  std::uint64_t first = 0;
  std::uint64_t last = 0;
};

SeedRange parse_seeds(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) throw ConfigError("--seeds: expected a..b, got '" + text + "'");
  auto number = [&](std::string_view s) {
    std::uint64_t v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || r.ec != std::errc{} || r.ptr != s.data() + s.size()) {
      throw ConfigError("--seeds: '" + std::string(s) + "' is not a seed");
    }
    return v;
  };
  const std::string_view view(text);
  SeedRange range{number(view.substr(0, dots)), number(view.substr(dots + 2))};
  if (range.last < range.first) throw ConfigError("--seeds: empty range '" + text + "'");
  return range;
}

void print_run_line(std::ostream& out, const std::filesystem::path& dir, const RunOutput& run) {
  out << dir.string() << ": " << run.counters.events << " events, " << run.trades.size() << " trades, "
      << format_time(run.end_t_us) << " s" << (run.halted ? " (halted)" : "") << '\n';
}

int simulate(const ConfigSource& source, std::optional<std::uint64_t> seed, const std::string& seeds,
             std::string out_dir, unsigned jobs, bool quiet, std::ostream& out) {
  auto config = source.load();
  if (seed && !seeds.empty()) throw ConfigError("--seed and --seeds are mutually exclusive");
  if (seed) config.seed = *seed;
  if (seeds.empty()) {
    if (out_dir.empty()) out_dir = "runs/" + config.preset + "-seed" + std::to_string(config.seed);
    const auto result = run_to_directory(out_dir, config);
    if (!quiet) print_run_line(out, out_dir, result);
    return kExitOk;
  }

  const auto range = parse_seeds(seeds);
  if (out_dir.empty()) out_dir = "runs/" + config.preset;
  std::atomic<std::uint64_t> next{range.first};
  std::mutex lock;
  std::exception_ptr failure;
  auto worker = [&] {
    while (true) {
      const auto s = next.fetch_add(1);
      if (s > range.last) return;
      {
        std::lock_guard guard(lock);
        if (failure) return;
      }
      auto c = config;
      c.seed = s;
      const auto dir = std::filesystem::path(out_dir) / ("seed_" + std::to_string(s));
      try {
        const auto result = run_to_directory(dir, c);
        std::lock_guard guard(lock);
        if (!quiet) print_run_line(out, dir, result);
      } catch (...) {
        std::lock_guard guard(lock);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const auto count = range.last - range.first + 1;
  const auto threads = std::max<unsigned>(1, static_cast<unsigned>(std::min<std::uint64_t>(jobs, count)));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return kExitOk;
}

void print_diagnostics(std::ostream& out, const SimConfig& config, const CancelVolumeTracker& cancelled) {
  const auto d = flow_diagnostics(config.rates, VolumeSampler(config.volume_model_limit),
                                  VolumeSampler(config.volume_model_market), cancelled);
  auto line = [&](std::string_view key, const std::string& value) { out << key << " = " << value << '\n'; };
  auto sign = [](int s) { return s < 0 ? std::string("negative") : s > 0 ? std::string("positive") : std::string("zero"); };
  line("preset", config.preset);
  line("rate_total", format_double(config.rates.total()));
  line("S_L", format_double(d.S_L));
  line("S_M", format_double(d.S_M));
  line("S_C", format_double(d.S_C) + (d.S_C_provisional ? " (provisional, no cancellations measured)" : ""));
  line("S_C_error", format_double(d.S_C_error));
  line("cancellations_measured", std::to_string(cancelled.count()));
  line("V_in", format_double(d.V_in));
  line("V_out", format_double(d.V_out));
  line("delta_s", format_double(d.delta_s) + " (" + sign(d.delta_s_sign) + ")");
  line("delta_d", format_double(d.delta_d) + " (" + sign(d.delta_d_sign) + ")");
  line("supply", format_double(d.supply));
  line("demand", format_double(d.demand));
  line("stable", d.delta_s_sign < 0 && d.delta_d_sign < 0 ? "yes" : "no");
}

}  // namespace

int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Order book simulator driven by Poisson order flow", "cob"};
  app.set_version_flag("--version", "cob " + std::string(version()));
  app.require_subcommand(1);

  auto* sim = app.add_subcommand("simulate", "Run the simulator and write a run directory");
  ConfigSource sim_source;
  sim_source.add_to(*sim);
  std::optional<std::uint64_t> seed;
  std::string seeds, sim_out;
  unsigned jobs = 1;
  bool quiet = false;
  sim->add_option("--seed", seed, "Random seed (overrides the configuration)");
  sim->add_option("--seeds", seeds, "Seed range a..b; one subdirectory per seed");
  sim->add_option("--out", sim_out, "Output directory (created if absent)");
  sim->add_option("--jobs", jobs, "Parallel runs for --seeds")->check(CLI::PositiveNumber);
  sim->add_flag("--quiet", quiet, "Print nothing on success");
  sim->add_option("overrides", sim_source.overrides, "key=value overrides");

  auto* ana = app.add_subcommand("analyze", "Compute statistics over one run or a batch of runs");
  std::string ana_in, ana_out;
  ana->add_option("run", ana_in, "Run directory, or a directory of per-seed runs")->required();
  ana->add_option("--out", ana_out, "Output directory (default: <run>/analysis)");

  auto* pre = app.add_subcommand("presets", "List built-in presets");
  bool names_only = false;
  pre->add_flag("--names", names_only, "Print names only");

  auto* dia = app.add_subcommand("diagnostics", "Print flow balance diagnostics for a configuration");
  ConfigSource dia_source;
  dia_source.add_to(*dia);
  std::string dia_run;
  dia->add_option("--run", dia_run, "Use the cancelled-volume mean measured in this run directory");
  dia->add_option("overrides", dia_source.overrides, "key=value overrides");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (sim->parsed()) return simulate(sim_source, seed, seeds, sim_out, jobs, quiet, out);
    if (ana->parsed()) {
      const auto runs = discover_runs(ana_in);
      const std::filesystem::path dest = ana_out.empty() ? std::filesystem::path(ana_in) / "analysis" : std::filesystem::path(ana_out);
      out << analyze(runs, dest);
      return kExitOk;
    }
    if (pre->parsed()) {
      for (const auto& name : preset_names()) {
        if (names_only) {
          out << name << '\n';
        } else {
          out << name << std::string(name.size() < 22 ? 22 - name.size() : 1, ' ') << preset_summary(name) << '\n';
        }
      }
      return kExitOk;
    }
    if (dia->parsed()) {
      const auto config = dia_source.load();
      CancelVolumeTracker cancelled;
      if (!dia_run.empty()) cancelled = load_run(dia_run).cancelled;
      print_diagnostics(out, config, cancelled);
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitUsage;
}

}  // namespace cob::cli
