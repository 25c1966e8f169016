#include "cob/io.hpp"

#include "cob/stats.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#ifndef COB_VERSION
#define COB_VERSION "0.0.0"
#endif

namespace cob {

std::string_view version() noexcept { return COB_VERSION; }

std::string header_line(const SimConfig& config) {
  return "# cob " + std::string(version()) + " seed=" + std::to_string(config.seed) + " preset=" + config.preset;
}

std::string format_time(std::int64_t t_us) {
  const bool negative = t_us < 0;
  const auto mag = negative ? -t_us : t_us;
  auto frac = std::to_string(mag % kMicrosPerSecond);
  frac.insert(0, 6 - frac.size(), '0');
  return (negative ? "-" : "") + std::to_string(mag / kMicrosPerSecond) + "." + frac;
}

namespace {

constexpr std::string_view kTradesHeader = "t,side,volume,filled,unfilled,spread_after,first_price,last_price,fills";
constexpr std::string_view kSeriesHeader = "second,mid,best_bid,best_ask,spread,s_total,d_total,s_100,d_100";
constexpr std::string_view kProfilesHeader = "t,level,volume";

std::string money(std::int64_t ticks, double tick, int decimals) {
  return format_fixed(static_cast<double>(ticks) * tick, decimals);
}

std::int64_t to_ticks(double money_value, double tick) {
  return static_cast<std::int64_t>(std::llround(money_value / tick));
}

}  // namespace

void write_event(std::ostream& out, const SimEvent& ev, double tick) {
  const int dec = tick_decimals(tick);
  std::string s;
  s.reserve(256);
  s += "{\"index\":";
  s += std::to_string(ev.index);
  s += ",\"t\":";
  s += format_time(ev.t_us);
  s += ",\"phase\":\"";
  s += to_string(ev.phase);
  s += "\",\"kind\":\"";
  s += to_string(ev.kind);
  s += "\",\"side\":\"";
  s += to_string(ev.side);
  s += "\",\"level\":";
  s += std::to_string(ev.level);
  s += ",\"volume\":";
  s += std::to_string(ev.volume);
  s += ",\"order_id\":";
  s += std::to_string(ev.order_id.value);
  s += ",\"price\":";
  s += money(ev.price.value, tick, dec);
  s += ",\"price_tick\":";
  s += std::to_string(ev.price.value);
  s += ",\"fills\":[";
  for (std::size_t i = 0; i < ev.fills.size(); ++i) {
    if (i) s += ',';
    s += "{\"price_tick\":";
    s += std::to_string(ev.fills[i].price.value);
    s += ",\"volume\":";
    s += std::to_string(ev.fills[i].volume);
    s += ",\"maker\":";
    s += std::to_string(ev.fills[i].maker.value);
    s += '}';
  }
  s += "],\"unfilled\":";
  s += std::to_string(ev.unfilled);
  s += ",\"spread_after\":";
  s += ev.spread_after ? std::to_string(*ev.spread_after) : "null";
  s += ",\"gated\":";
  s += ev.gated ? "true" : "false";
  s += ",\"gates\":";
  s += std::to_string(ev.gates);
  s += "}\n";
  out << s;
}

void write_events(std::ostream& out, const RunOutput& run) {
  out << header_line(run.config) << '\n';
  for (const auto& ev : run.events) write_event(out, ev, run.config.tick);
}

void write_trades(std::ostream& out, const RunOutput& run) {
  const double tick = run.config.tick;
  const int dec = tick_decimals(tick);
  out << header_line(run.config) << '\n' << kTradesHeader << '\n';
  for (const auto& t : run.trades) {
    out << format_time(t.t_us) << ',' << to_string(t.side) << ',' << t.volume << ',' << t.filled << ','
        << t.unfilled << ',' << (t.spread_after ? std::to_string(*t.spread_after) : "") << ','
        << (t.fills ? money(t.first_price.value, tick, dec) : "") << ','
        << (t.fills ? money(t.last_price.value, tick, dec) : "") << ',' << t.fills << '\n';
  }
}

void write_series(std::ostream& out, const RunOutput& run) {
  const double tick = run.config.tick;
  const int dec = tick_decimals(tick);
  out << header_line(run.config) << '\n'
      << "# prices in money units (tick " << format_double(tick) << "), spread in ticks, depth in contracts\n"
      << kSeriesHeader << '\n';
  for (const auto& r : run.series) {
    out << r.second << ',';
    if (const auto m2 = r.mid2()) out << format_fixed(static_cast<double>(*m2) * tick / 2.0, dec + 1);
    out << ',';
    if (r.best_bid) out << money(r.best_bid->value, tick, dec);
    out << ',';
    if (r.best_ask) out << money(r.best_ask->value, tick, dec);
    out << ',';
    if (const auto sp = r.spread()) out << *sp;
    out << ',' << r.s_total << ',' << r.d_total << ',' << r.s_window << ',' << r.d_window << '\n';
  }
}

void write_profiles(std::ostream& out, const RunOutput& run) {
  const int window = run.config.profile_window;
  out << header_line(run.config) << '\n'
      << "# window " << window << " levels; level<0 bids (volume>0), level>0 asks (volume<0); t,0,0 opens a snapshot\n"
      << kProfilesHeader << '\n';
  for (const auto& p : run.profiles) {
    const auto t = format_time(p.t_us);
    out << t << ",0,0\n";
    for (int i = 0; i < 2 * window; ++i) {
      const auto v = p.x[static_cast<std::size_t>(i)];
      if (v == 0) continue;
      const int level = i < window ? -(window - i) : i - window + 1;
      out << t << ',' << level << ',' << v << '\n';
    }
  }
}

void write_manifest(std::ostream& out, const RunOutput& run) {
  out << header_line(run.config) << '\n' << format_config(run.config);
  auto fact = [&](std::string_view key, const std::string& value) { out << "#@ " << key << " = " << value << '\n'; };
  fact("run.events", std::to_string(run.counters.events));
  fact("run.gated", std::to_string(run.counters.gated));
  fact("run.end_t_us", std::to_string(run.end_t_us));
  fact("run.stats_start_us", std::to_string(run.stats_start_us));
  fact("run.halted", run.halted ? "1" : "0");
  for (const auto side : {Side::Buy, Side::Sell}) {
    const auto& c = run.counters.side(side);
    const std::string p = side == Side::Buy ? "counters.bid." : "counters.ask.";
    fact(p + "seeded", std::to_string(c.seeded));
    fact(p + "submitted", std::to_string(c.submitted));
    fact(p + "cancelled", std::to_string(c.cancelled));
    fact(p + "filled", std::to_string(c.filled));
    fact(p + "rejected", std::to_string(c.rejected));
  }
  fact("final.s_total", std::to_string(run.final_depth.s_total));
  fact("final.d_total", std::to_string(run.final_depth.d_total));
  if (!run.diagnostics.empty()) {
    const auto& d = run.diagnostics.back().diagnostics;
    fact("diagnostics.S_L", format_double(d.S_L));
    fact("diagnostics.S_M", format_double(d.S_M));
    fact("diagnostics.S_C", format_double(d.S_C));
    fact("diagnostics.S_C_error", format_double(d.S_C_error));
    fact("diagnostics.V_in", format_double(d.V_in));
    fact("diagnostics.V_out", format_double(d.V_out));
    fact("diagnostics.delta_s", format_double(d.delta_s));
    fact("diagnostics.delta_d", format_double(d.delta_d));
    fact("diagnostics.supply", format_double(d.supply));
    fact("diagnostics.demand", format_double(d.demand));
  }
}

void write_run(const std::filesystem::path& dir, const RunOutput& run) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(dir.string() + ": cannot create directory: " + ec.message());
  auto emit = [&](std::string_view name, auto&& writer) {
    const auto path = dir / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path.string() + ": cannot open for writing");
    writer(out, run);
    out.flush();
    if (!out) throw IoError(path.string() + ": write failed");
  };
  emit(files::kEvents, [](std::ostream& o, const RunOutput& r) { write_events(o, r); });
  emit(files::kTrades, [](std::ostream& o, const RunOutput& r) { write_trades(o, r); });
  emit(files::kSeries, [](std::ostream& o, const RunOutput& r) { write_series(o, r); });
  emit(files::kProfiles, [](std::ostream& o, const RunOutput& r) { write_profiles(o, r); });
  emit(files::kManifest, [](std::ostream& o, const RunOutput& r) { write_manifest(o, r); });
}

RunOutput run_to_directory(const std::filesystem::path& dir, const SimConfig& config) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(dir.string() + ": cannot create directory: " + ec.message());
  const auto events_path = dir / files::kEvents;
  std::ofstream events(events_path, std::ios::binary | std::ios::trunc);
  if (!events) throw IoError(events_path.string() + ": cannot open for writing");
  events << header_line(config) << '\n';

  RunOptions options;
  options.keep_events = false;
  options.observer = [&](const SimEvent& ev, const Book&) { write_event(events, ev, config.tick); };
  auto out = run(config, options);
  events.flush();
  if (!events) throw IoError(events_path.string() + ": write failed");
  events.close();

  auto emit = [&](std::string_view name, void (*writer)(std::ostream&, const RunOutput&)) {
    const auto path = dir / name;
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError(path.string() + ": cannot open for writing");
    writer(f, out);
    f.flush();
    if (!f) throw IoError(path.string() + ": write failed");
  };
  emit(files::kTrades, write_trades);
  emit(files::kSeries, write_series);
  emit(files::kProfiles, write_profiles);
  emit(files::kManifest, write_manifest);
  return out;
}

// ------------------------------------------------------------------ reading

namespace {

[[noreturn]] void bad(std::string_view source, std::size_t line, const std::string& what) {
  throw DataError(std::string(source) + ":" + std::to_string(line) + ": " + what);
}

std::int64_t parse_time(std::string_view text, std::string_view source, std::size_t line) {
  const auto dot = text.find('.');
  if (dot == std::string_view::npos || text.size() - dot - 1 != 6) {
    bad(source, line, "time '" + std::string(text) + "' is not seconds with six decimals");
  }
  std::int64_t whole = 0, frac = 0;
  const bool negative = !text.empty() && text.front() == '-';
  const auto w = text.substr(negative ? 1 : 0, dot - (negative ? 1 : 0));
  const auto f = text.substr(dot + 1);
  const auto r1 = std::from_chars(w.data(), w.data() + w.size(), whole);
  const auto r2 = std::from_chars(f.data(), f.data() + f.size(), frac);
  if (r1.ec != std::errc{} || r1.ptr != w.data() + w.size() || r2.ec != std::errc{} || r2.ptr != f.data() + f.size()) {
    bad(source, line, "malformed time '" + std::string(text) + "'");
  }
  const auto t = whole * kMicrosPerSecond + frac;
  return negative ? -t : t;
}

template <class T>
T parse_number(std::string_view text, std::string_view source, std::size_t line, std::string_view column) {
  T v{};
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    bad(source, line, std::string(column) + ": expected a number, got '" + std::string(text) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    out.push_back(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

Side parse_side(std::string_view text, std::string_view source, std::size_t line) {
  if (text == "buy") return Side::Buy;
  if (text == "sell") return Side::Sell;
  bad(source, line, "side must be buy or sell, got '" + std::string(text) + "'");
}

// Calls row(fields, line) for each data row after checking the header row.
template <class Row>
void read_csv(const std::filesystem::path& path, std::string_view header, Row&& row) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path.string() + ": missing or unreadable");
  const auto source = path.string();
  const auto columns = split(header).size();
  std::string line;
  std::size_t n = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!seen_header) {
      if (line != header) bad(source, n, "expected header '" + std::string(header) + "'");
      seen_header = true;
      continue;
    }
    const auto fields = split(line);
    if (fields.size() != columns) {
      bad(source, n, "expected " + std::to_string(columns) + " fields, got " + std::to_string(fields.size()));
    }
    row(fields, n);
  }
  if (!seen_header) bad(source, n, "missing header row");
}

}  // namespace

std::vector<SimEvent> read_events(std::istream& in, std::string_view source) {
  std::vector<SimEvent> events;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty() || line.front() == '#') continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      bad(source, n, std::string("malformed JSON: ") + e.what());
    }
    try {
      SimEvent ev;
      ev.index = j.at("index").get<std::uint64_t>();
      ev.t_us = std::llround(j.at("t").get<double>() * static_cast<double>(kMicrosPerSecond));
      const auto phase = parse_phase(j.at("phase").get<std::string>());
      const auto kind = parse_event_kind(j.at("kind").get<std::string>());
      if (!phase) bad(source, n, "unknown phase");
      if (!kind) bad(source, n, "unknown event kind");
      ev.phase = *phase;
      ev.kind = *kind;
      ev.side = parse_side(j.at("side").get<std::string>(), source, n);
      ev.level = j.at("level").get<int>();
      ev.volume = j.at("volume").get<Volume>();
      ev.order_id = OrderId{j.at("order_id").get<std::uint64_t>()};
      ev.price = PriceTick{j.at("price_tick").get<std::int64_t>()};
      for (const auto& f : j.at("fills")) {
        ev.fills.push_back(Fill{PriceTick{f.at("price_tick").get<std::int64_t>()}, f.at("volume").get<Volume>(),
                                OrderId{f.at("maker").get<std::uint64_t>()}});
      }
      ev.unfilled = j.at("unfilled").get<Volume>();
      if (!j.at("spread_after").is_null()) ev.spread_after = j.at("spread_after").get<std::int64_t>();
      ev.gated = j.at("gated").get<bool>();
      ev.gates = j.at("gates").get<std::uint8_t>();
      events.push_back(std::move(ev));
    } catch (const nlohmann::json::exception& e) {
      bad(source, n, std::string("bad event record: ") + e.what());
    }
  }
  return events;
}

RunOutput load_run(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw DataError(dir.string() + ": not a run directory");
  RunOutput run;

  // Manifest: configuration plus `#@` run facts.
  const auto manifest_path = dir / files::kManifest;
  std::ifstream manifest(manifest_path, std::ios::binary);
  if (!manifest) throw DataError(manifest_path.string() + ": missing or unreadable");
  std::ostringstream text;
  text << manifest.rdbuf();
  try {
    run.config = parse_config(text.str(), manifest_path.string());
  } catch (const ConfigError& e) {
    throw DataError(e.what());
  }
  {
    std::map<std::string, std::string> facts;
    std::istringstream lines(text.str());
    std::string line;
    while (std::getline(lines, line)) {
      if (line.rfind("#@ ", 0) != 0) continue;
      const auto eq = line.find(" = ");
      if (eq == std::string::npos) continue;
      facts[line.substr(3, eq - 3)] = line.substr(eq + 3);
    }
    auto get = [&](const std::string& key) -> std::int64_t {
      const auto it = facts.find(key);
      if (it == facts.end()) throw DataError(manifest_path.string() + ": missing run fact '" + key + "'");
      return parse_number<std::int64_t>(it->second, manifest_path.string(), 0, key);
    };
    run.counters.events = static_cast<std::uint64_t>(get("run.events"));
    run.counters.gated = static_cast<std::uint64_t>(get("run.gated"));
    run.end_t_us = get("run.end_t_us");
    run.stats_start_us = get("run.stats_start_us");
    run.halted = get("run.halted") != 0;
    for (const auto side : {Side::Buy, Side::Sell}) {
      auto& c = run.counters.side(side);
      const std::string p = side == Side::Buy ? "counters.bid." : "counters.ask.";
      c.seeded = get(p + "seeded");
      c.submitted = get(p + "submitted");
      c.cancelled = get(p + "cancelled");
      c.filled = get(p + "filled");
      c.rejected = static_cast<std::uint64_t>(get(p + "rejected"));
    }
    run.final_depth.s_total = run.final_depth.s_l = get("final.s_total");
    run.final_depth.d_total = run.final_depth.d_l = get("final.d_total");
  }
  const double tick = run.config.tick;

  {
    const auto path = dir / files::kEvents;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(path.string() + ": missing or unreadable");
    run.events = read_events(in, path.string());
    run.cancelled = cancelled_volumes(run.events);
  }

  {
    const auto path = dir / files::kTrades;
    const auto source = path.string();
    read_csv(path, kTradesHeader, [&](const std::vector<std::string_view>& f, std::size_t n) {
      TradeRecord t;
      t.t_us = parse_time(f[0], source, n);
      t.side = parse_side(f[1], source, n);
      t.volume = parse_number<Volume>(f[2], source, n, "volume");
      t.filled = parse_number<Volume>(f[3], source, n, "filled");
      t.unfilled = parse_number<Volume>(f[4], source, n, "unfilled");
      if (!f[5].empty()) t.spread_after = parse_number<std::int64_t>(f[5], source, n, "spread_after");
      t.fills = parse_number<std::size_t>(f[8], source, n, "fills");
      if (t.fills) {
        t.first_price = PriceTick{to_ticks(parse_number<double>(f[6], source, n, "first_price"), tick)};
        t.last_price = PriceTick{to_ticks(parse_number<double>(f[7], source, n, "last_price"), tick)};
      }
      run.trades.push_back(t);
    });
  }

  {
    const auto path = dir / files::kSeries;
    const auto source = path.string();
    read_csv(path, kSeriesHeader, [&](const std::vector<std::string_view>& f, std::size_t n) {
      SeriesRow r;
      r.second = parse_number<std::int64_t>(f[0], source, n, "second");
      if (!f[2].empty()) r.best_bid = PriceTick{to_ticks(parse_number<double>(f[2], source, n, "best_bid"), tick)};
      if (!f[3].empty()) r.best_ask = PriceTick{to_ticks(parse_number<double>(f[3], source, n, "best_ask"), tick)};
      r.s_total = parse_number<Volume>(f[5], source, n, "s_total");
      r.d_total = parse_number<Volume>(f[6], source, n, "d_total");
      r.s_window = parse_number<Volume>(f[7], source, n, "s_100");
      r.d_window = parse_number<Volume>(f[8], source, n, "d_100");
      run.series.push_back(r);
    });
  }

  {
    const auto path = dir / files::kProfiles;
    const auto source = path.string();
    const int window = run.config.profile_window;
    read_csv(path, kProfilesHeader, [&](const std::vector<std::string_view>& f, std::size_t n) {
      const auto t = parse_time(f[0], source, n);
      const auto level = parse_number<int>(f[1], source, n, "level");
      const auto volume = parse_number<Volume>(f[2], source, n, "volume");
      if (level == 0) {
        run.profiles.push_back(ProfileSnapshot{t, std::vector<Volume>(2 * static_cast<std::size_t>(window), 0)});
        return;
      }
      if (run.profiles.empty() || run.profiles.back().t_us != t) bad(source, n, "profile row outside a snapshot");
      if (level < -window || level > window) bad(source, n, "level outside the profile window");
      const auto slot = level < 0 ? window + level : window + level - 1;
      run.profiles.back().x[static_cast<std::size_t>(slot)] = volume;
    });
  }
  return run;
}

}  // namespace cob
