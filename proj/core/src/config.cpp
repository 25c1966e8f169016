#include "cob/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "cob/error.hpp"

namespace cob {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string format_fixed(double value, int decimals) {
  char buf[128];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, decimals);
  return std::string(buf, res.ptr);
}

int tick_decimals(double tick) {
  double scale = 1.0;
  for (int d = 0; d < 9; ++d, scale *= 10.0) {
    const double x = tick * scale;
    if (std::abs(x - std::round(x)) < 1e-9 * scale) return d;
  }
  return 9;
}

Span effective_warmup(const SimConfig& config) {
  if (config.warmup) return *config.warmup;
  if (const auto* e = std::get_if<EventCount>(&config.horizon)) return EventCount{e->n / 10};
  return Duration{std::get<Duration>(config.horizon).seconds / 10.0};
}

void validate(const SimConfig& c) {
  validate(c.rates);
  validate(c.level_model);
  validate(c.volume_model_limit);
  validate(c.volume_model_market);
  const auto vm = max_volume(c.volume_model_market);
  if (c.guards.s_min <= vm || c.guards.d_min <= vm) {
    throw ConfigError("guards.s_min and guards.d_min must exceed the largest market volume (" +
                      std::to_string(vm) + ")");
  }
  if (!(c.tick > 0.0) || !std::isfinite(c.tick)) throw ConfigError("tick must be positive");
  // A buy one level under the reference must land on a positive price.
  if (c.initial_reference.value < 2) throw ConfigError("initial_reference must be at least 2");
  if (!(c.snapshot_every > 0.0)) throw ConfigError("snapshot_every must be positive");
  if (c.profile_window < 1) throw ConfigError("profile_window must be at least 1");

  const auto warm = effective_warmup(c);
  if (warm.index() != c.horizon.index()) {
    throw ConfigError("warmup and horizon must use the same unit (events or seconds)");
  }
  if (const auto* h = std::get_if<EventCount>(&c.horizon)) {
    if (h->n == 0) throw ConfigError("horizon.events must be positive");
    if (std::get<EventCount>(warm).n >= h->n) throw ConfigError("warmup must be shorter than the horizon");
  } else {
    const double hs = std::get<Duration>(c.horizon).seconds;
    const double w = std::get<Duration>(warm).seconds;
    if (!(hs > 0.0) || !std::isfinite(hs)) throw ConfigError("horizon.seconds must be positive");
    if (!(w >= 0.0) || w >= hs) throw ConfigError("warmup must be nonnegative and shorter than the horizon");
  }
}

namespace {

struct Entry {
  std::string value;
  std::size_t line = 0;
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

class Reader {
 public:
  Reader(std::map<std::string, Entry> entries, std::string source)
      : entries_(std::move(entries)), source_(std::move(source)) {}

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  std::optional<Entry> take(const std::string& key) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    auto e = it->second;
    entries_.erase(it);
    return e;
  }

  [[noreturn]] void fail(const Entry& e, const std::string& key, const std::string& what) const {
    throw ConfigError(source_ + ":" + std::to_string(e.line) + ": " + key + ": " + what);
  }

  void read(const std::string& key, double& out) {
    if (auto e = take(key)) {
      double v = 0.0;
      const auto* first = e->value.data();
      const auto* last = first + e->value.size();
      const auto res = std::from_chars(first, last, v);
      if (res.ec != std::errc{} || res.ptr != last || !std::isfinite(v)) fail(*e, key, "expected a number, got '" + e->value + "'");
      out = v;
    }
  }

  template <class Int>
  void read_int(const std::string& key, Int& out) {
    if (auto e = take(key)) {
      Int v{};
      const auto* first = e->value.data();
      const auto* last = first + e->value.size();
      const auto res = std::from_chars(first, last, v);
      if (res.ec != std::errc{} || res.ptr != last) fail(*e, key, "expected an integer, got '" + e->value + "'");
      out = v;
    }
  }

  void read(const std::string& key, std::string& out) {
    if (auto e = take(key)) out = e->value;
  }

  void reject_leftovers() const {
    if (entries_.empty()) return;
    // Report the earliest offending line.
    auto first = entries_.begin();
    for (auto it = entries_.begin(); it != entries_.end(); ++it) {
      if (it->second.line < first->second.line) first = it;
    }
    fail(first->second, first->first, "unknown key");
  }

  const std::string& source() const { return source_; }

 private:
  std::map<std::string, Entry> entries_;
  std::string source_;
};

std::map<std::string, Entry> tokenize(std::string_view text, std::string_view source) {
  std::map<std::string, Entry> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = trim(text.substr(pos, end - pos));
    ++line_no;
    pos = end + 1;
    if (line.empty() || line.front() == '#') {
      if (end == text.size()) break;
      continue;
    }
    const auto eq = line.find('=');
    const auto where = std::string(source) + ":" + std::to_string(line_no) + ": ";
    if (eq == std::string_view::npos) throw ConfigError(where + "expected 'key = value'");
    const auto key = std::string(trim(line.substr(0, eq)));
    const auto value = std::string(trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError(where + "empty key");
    if (value.empty()) throw ConfigError(where + key + ": empty value");
    if (out.count(key)) throw ConfigError(where + key + ": duplicate key");
    out.emplace(key, Entry{value, line_no});
    if (end == text.size()) break;
  }
  return out;
}

VolumeModel read_volume(Reader& r, const std::string& prefix, const VolumeModel& fallback) {
  std::string kind = std::holds_alternative<PowerLaw>(fallback) ? "power_law" : "round_lot_mixture";
  const auto kind_entry = r.take(prefix + ".kind");
  if (kind_entry) kind = kind_entry->value;
  if (kind == "power_law") {
    PowerLaw p = std::holds_alternative<PowerLaw>(fallback) ? std::get<PowerLaw>(fallback) : PowerLaw{};
    r.read(prefix + ".gamma", p.gamma);
    r.read_int(prefix + ".v_max", p.v_max);
    return p;
  }
  if (kind == "round_lot_mixture") {
    RoundLotMixture m = std::holds_alternative<RoundLotMixture>(fallback) ? std::get<RoundLotMixture>(fallback)
                                                                           : RoundLotMixture{};
    r.read(prefix + ".w1", m.w1);
    r.read(prefix + ".w10", m.w10);
    r.read(prefix + ".w100", m.w100);
    r.read(prefix + ".gamma1", m.gamma1);
    r.read(prefix + ".gamma10", m.gamma10);
    r.read(prefix + ".gamma100", m.gamma100);
    r.read_int(prefix + ".v_max", m.v_max);
    return m;
  }
  r.fail(*kind_entry, prefix + ".kind", "expected power_law or round_lot_mixture, got '" + kind + "'");
}

std::optional<Span> read_span(Reader& r, const std::string& prefix) {
  const bool ev = r.has(prefix + ".events");
  const bool sec = r.has(prefix + ".seconds");
  if (ev && sec) {
    const auto e = r.take(prefix + ".seconds");
    r.fail(*e, prefix + ".seconds", "give either " + prefix + ".events or " + prefix + ".seconds, not both");
  }
  if (ev) {
    EventCount c;
    r.read_int(prefix + ".events", c.n);
    return c;
  }
  if (sec) {
    Duration d;
    r.read(prefix + ".seconds", d.seconds);
    return d;
  }
  return std::nullopt;
}

}  // namespace

SimConfig parse_config(std::string_view text, std::string_view source) {
  Reader r(tokenize(text, source), std::string(source));
  SimConfig c;
  r.read("preset", c.preset);
  r.read("rates.limit_bid", c.rates.limit_bid);
  r.read("rates.limit_ask", c.rates.limit_ask);
  r.read("rates.market_bid", c.rates.market_bid);
  r.read("rates.market_ask", c.rates.market_ask);
  r.read("rates.cancel_bid", c.rates.cancel_bid);
  r.read("rates.cancel_ask", c.rates.cancel_ask);
  r.read("level_model.exponent", c.level_model.exponent);
  r.read_int("level_model.head_cut", c.level_model.head_cut);
  r.read_int("level_model.max_level", c.level_model.max_level);
  c.volume_model_limit = read_volume(r, "volume_model_limit", c.volume_model_limit);
  c.volume_model_market = read_volume(r, "volume_model_market", c.volume_model_market);
  r.read_int("guards.s_min", c.guards.s_min);
  r.read_int("guards.d_min", c.guards.d_min);
  r.read("tick", c.tick);
  r.read_int("initial_reference", c.initial_reference.value);
  if (auto h = read_span(r, "horizon")) c.horizon = *h;
  c.warmup = read_span(r, "warmup");
  r.read_int("seed", c.seed);
  r.read("snapshot_every", c.snapshot_every);
  r.read_int("profile_window", c.profile_window);
  r.reject_leftovers();
  try {
    validate(c);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(source) + ": " + e.what());
  }
  return c;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

namespace {

void put(std::ostringstream& out, const std::string& key, const std::string& value) {
  out << key << " = " << value << '\n';
}

void put_volume(std::ostringstream& out, const std::string& prefix, const VolumeModel& model) {
  if (const auto* p = std::get_if<PowerLaw>(&model)) {
    put(out, prefix + ".kind", "power_law");
    put(out, prefix + ".gamma", format_double(p->gamma));
    put(out, prefix + ".v_max", std::to_string(p->v_max));
    return;
  }
  const auto& m = std::get<RoundLotMixture>(model);
  put(out, prefix + ".kind", "round_lot_mixture");
  put(out, prefix + ".w1", format_double(m.w1));
  put(out, prefix + ".w10", format_double(m.w10));
  put(out, prefix + ".w100", format_double(m.w100));
  put(out, prefix + ".gamma1", format_double(m.gamma1));
  put(out, prefix + ".gamma10", format_double(m.gamma10));
  put(out, prefix + ".gamma100", format_double(m.gamma100));
  put(out, prefix + ".v_max", std::to_string(m.v_max));
}

void put_span(std::ostringstream& out, const std::string& prefix, const Span& span) {
  if (const auto* e = std::get_if<EventCount>(&span)) {
    put(out, prefix + ".events", std::to_string(e->n));
  } else {
    put(out, prefix + ".seconds", format_double(std::get<Duration>(span).seconds));
  }
}

}  // namespace

std::string format_config(const SimConfig& c) {
  std::ostringstream out;
  put(out, "preset", c.preset);
  put(out, "rates.limit_bid", format_double(c.rates.limit_bid));
  put(out, "rates.limit_ask", format_double(c.rates.limit_ask));
  put(out, "rates.market_bid", format_double(c.rates.market_bid));
  put(out, "rates.market_ask", format_double(c.rates.market_ask));
  put(out, "rates.cancel_bid", format_double(c.rates.cancel_bid));
  put(out, "rates.cancel_ask", format_double(c.rates.cancel_ask));
  put(out, "level_model.exponent", format_double(c.level_model.exponent));
  put(out, "level_model.head_cut", std::to_string(c.level_model.head_cut));
  put(out, "level_model.max_level", std::to_string(c.level_model.max_level));
  put_volume(out, "volume_model_limit", c.volume_model_limit);
  put_volume(out, "volume_model_market", c.volume_model_market);
  put(out, "guards.s_min", std::to_string(c.guards.s_min));
  put(out, "guards.d_min", std::to_string(c.guards.d_min));
  put(out, "tick", format_double(c.tick));
  put(out, "initial_reference", std::to_string(c.initial_reference.value));
  put_span(out, "horizon", c.horizon);
  if (c.warmup) put_span(out, "warmup", *c.warmup);
  put(out, "seed", std::to_string(c.seed));
  put(out, "snapshot_every", format_double(c.snapshot_every));
  put(out, "profile_window", std::to_string(c.profile_window));
  return out.str();
}

SimConfig apply_overrides(const SimConfig& config, const std::vector<std::string>& overrides) {
  auto entries = tokenize(format_config(config), "<config>");
  // Known keys are those of either volume-model kind plus both span units.
  std::map<std::string, Entry> known = entries;
  {
    SimConfig alt = config;
    alt.volume_model_limit = std::holds_alternative<PowerLaw>(config.volume_model_limit)
                                 ? VolumeModel{RoundLotMixture{}}
                                 : VolumeModel{PowerLaw{}};
    alt.volume_model_market = std::holds_alternative<PowerLaw>(config.volume_model_market)
                                  ? VolumeModel{RoundLotMixture{}}
                                  : VolumeModel{PowerLaw{}};
    for (auto& [k, v] : tokenize(format_config(alt), "<config>")) known.emplace(k, v);
    for (const char* k : {"horizon.events", "horizon.seconds", "warmup.events", "warmup.seconds"}) {
      known.emplace(k, Entry{});
    }
  }

  auto drop_prefix = [&](const std::string& prefix) {
    for (auto it = entries.begin(); it != entries.end();) {
      if (it->first.rfind(prefix, 0) == 0) {
        it = entries.erase(it);
      } else {
        ++it;
      }
    }
  };

  std::size_t n = 0;
  for (const auto& raw : overrides) {
    ++n;
    const auto eq = raw.find('=');
    const auto where = "override " + std::to_string(n) + " ('" + raw + "')";
    if (eq == std::string::npos) throw ConfigError(where + ": expected key=value");
    const auto key = std::string(trim(std::string_view(raw).substr(0, eq)));
    const auto value = std::string(trim(std::string_view(raw).substr(eq + 1)));
    if (!known.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    if (value.empty()) throw ConfigError(where + ": empty value");
    if (key.size() > 5 && key.compare(key.size() - 5, 5, ".kind") == 0) {
      const auto prefix = key.substr(0, key.size() - 4);
      if (entries.count(key) && entries[key].value != value) drop_prefix(prefix);
    }
    if (key == "horizon.events" || key == "horizon.seconds") drop_prefix("horizon.");
    if (key == "warmup.events" || key == "warmup.seconds") drop_prefix("warmup.");
    entries[key] = Entry{value, 0};
  }

  std::ostringstream text;
  for (const auto& [k, e] : entries) text << k << " = " << e.value << '\n';
  return parse_config(text.str(), "<overrides>");
}

}  // namespace cob
