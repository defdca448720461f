#include "attractor_forge/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "attractor_forge/errors.hpp"

namespace af {

namespace {

using T = ValueType;

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

bool parse_double(const std::string& s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

bool parse_int(const std::string& s, std::int64_t& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

bool valid_value(ValueType type, const std::string& v) {
  double d = 0.0;
  std::int64_t i = 0;
  switch (type) {
    case T::Number: return parse_double(v, d);
    case T::Integer: return parse_int(v, i);
    case T::Text: return !v.empty();
    case T::NumberOrAuto: return v == "auto" || parse_double(v, d);
    case T::NumberList: {
      if (v.empty()) return true;
      for (const auto& item : split_list(v))
        if (!parse_double(item, d)) return false;
      return true;
    }
  }
  return false;
}

const SectionSchema* find_section(const std::string& name) {
  for (const auto& s : config_schema())
    if (s.name == name) return &s;
  return nullptr;
}

const KeySchema* find_key(const SectionSchema& sec, const std::string& key) {
  for (const auto& k : sec.keys)
    if (k.name == key) return &k;
  return nullptr;
}

// Sections a kind cannot run without.
std::vector<std::string> required_sections(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::NoiseGen: return {"experiment", "noise"};
    default: return {"experiment", "drift"};
  }
}

}  // namespace

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Certify: return "certify";
    case ExperimentKind::Simulate: return "simulate";
    case ExperimentKind::Pullback: return "pullback";
    case ExperimentKind::Rates: return "rates";
    case ExperimentKind::NoiseGen: return "noise-gen";
  }
  return "?";
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
  if (s == "certify") return ExperimentKind::Certify;
  if (s == "simulate") return ExperimentKind::Simulate;
  if (s == "pullback") return ExperimentKind::Pullback;
  if (s == "rates") return ExperimentKind::Rates;
  if (s == "noise-gen") return ExperimentKind::NoiseGen;
  throw ConfigError("unknown experiment kind '" + s + "'");
}

const std::vector<SectionSchema>& config_schema() {
  static const std::vector<SectionSchema> schema = {
      {"experiment", {{"kind", T::Text, std::nullopt}, {"seed", T::Integer, "1"}}},
      {"drift",
       {{"family", T::Text, std::nullopt},
        {"p", T::Number, "2"},
        {"p_tilde", T::Number, "2"},
        {"r", T::Number, "2"},
        {"eta", T::Number, "0"},
        {"eta1", T::Number, "0"},
        {"delta", T::Number, std::nullopt},
        {"K", T::Number, std::nullopt},
        {"C", T::Number, std::nullopt},
        {"lambda", T::Number, std::nullopt}}},
      {"triple", {{"kind", T::Text, "auto"}}},
      {"grid", {{"n", T::Integer, "64"}, {"length", T::Number, "1"}, {"scalar", T::Text, "false"}}},
      {"noise",
       {{"kind", T::Text, "zero"},
        {"modes", T::Integer, "8"},
        {"decay", T::Number, "8"},
        {"scale", T::Number, "1"},
        {"weights", T::NumberList, std::nullopt},
        {"hurst", T::Number, "0.5"},
        {"drift", T::NumberList, std::nullopt},
        {"jump_rate", T::Number, "0"},
        {"jump_mode", T::Integer, "1"},
        {"jump_law", T::Text, "deterministic"},
        {"jump_mean", T::Number, "0"},
        {"jump_spread", T::Number, "0"},
        {"dt", T::Number, "0.001"},
        {"t_start", T::NumberOrAuto, "auto"},
        {"t_end", T::NumberOrAuto, "auto"},
        {"file", T::Text, std::nullopt}}},
      {"solver",
       {{"dt", T::Number, "0.001"},
        {"newton_tol", T::Number, "1e-10"},
        {"newton_max_iters", T::Integer, "50"},
        {"step_halving_max", T::Integer, "8"},
        {"damping", T::Number, "1"}}},
      {"certify",
       {{"condition", T::Text, "all"},
        {"trials", T::Integer, "1000"},
        {"tolerance", T::Number, "1e-10"},
        {"sampler_amplitude", T::Number, "1"},
        {"sampler_decay", T::Number, "2"}}},
      {"simulate",
       {{"s", T::Number, "0"},
        {"t", T::Number, "1"},
        {"initial", T::Text, "sin"},
        {"amplitude", T::Number, "1"},
        {"snapshot_stride", T::Integer, "1"}}},
      {"pullback",
       {{"s_list", T::NumberList, "-1,-2,-5,-10,-20,-40"},
        {"eval_time", T::Number, "0"},
        {"bundle", T::Integer, "10"},
        {"radius", T::Number, "1"}}},
      {"rates",
       {{"s1", T::Number, "0"},
        {"s2", T::Number, "0"},
        {"sample_times", T::NumberList, "0.1,1,10"},
        {"initial", T::Text, "sin"},
        {"x_amplitude", T::Number, "2"},
        {"y_amplitude", T::Number, "0"},
        {"eta_margin", T::Number, "0.1"}}},
  };
  return schema;
}

bool ExperimentConfig::has_section(const std::string& section) const {
  return values_.count(section) > 0;
}

bool ExperimentConfig::has(const std::string& section, const std::string& key) const {
  auto it = values_.find(section);
  return it != values_.end() && it->second.count(key) > 0;
}

const std::string& ExperimentConfig::text(const std::string& section, const std::string& key) const {
  auto it = values_.find(section);
  if (it == values_.end() || !it->second.count(key))
    throw ConfigError("missing key '" + key + "' in section [" + section + "]");
  return it->second.at(key);
}

double ExperimentConfig::number(const std::string& section, const std::string& key) const {
  double d = 0.0;
  if (!parse_double(text(section, key), d))
    throw ConfigError("[" + section + "] " + key + " is not a number");
  return d;
}

std::int64_t ExperimentConfig::integer(const std::string& section, const std::string& key) const {
  std::int64_t i = 0;
  if (!parse_int(text(section, key), i))
    throw ConfigError("[" + section + "] " + key + " is not an integer");
  return i;
}

std::vector<double> ExperimentConfig::numbers(const std::string& section,
                                              const std::string& key) const {
  std::vector<double> out;
  const std::string& v = text(section, key);
  if (v.empty()) return out;
  for (const auto& item : split_list(v)) {
    double d = 0.0;
    if (!parse_double(item, d)) throw ConfigError("[" + section + "] " + key + ": bad list item");
    out.push_back(d);
  }
  return out;
}

std::optional<double> ExperimentConfig::number_or_auto(const std::string& section,
                                                       const std::string& key) const {
  if (text(section, key) == "auto") return std::nullopt;
  return number(section, key);
}

void ExperimentConfig::set(const std::string& section, const std::string& key,
                           const std::string& value) {
  const SectionSchema* sec = find_section(section);
  if (!sec) throw ConfigError("unknown section [" + section + "]");
  const KeySchema* k = find_key(*sec, key);
  if (!k) throw ConfigError("unknown key '" + key + "' in section [" + section + "]");
  if (!valid_value(k->type, value))
    throw ConfigError("malformed value '" + value + "' for [" + section + "] " + key);
  values_[section][key] = value;
}

ExperimentKind ExperimentConfig::kind() const {
  return experiment_kind_from_string(text("experiment", "kind"));
}

std::uint64_t ExperimentConfig::seed() const {
  const auto s = integer("experiment", "seed");
  if (s < 0) throw ConfigError("[experiment] seed must be nonnegative");
  return static_cast<std::uint64_t>(s);
}

std::string ExperimentConfig::serialize() const {
  std::string out;
  for (const auto& sec : config_schema()) {
    auto it = values_.find(sec.name);
    if (it == values_.end()) continue;
    if (!out.empty()) out += '\n';
    out += "[" + sec.name + "]\n";
    for (const auto& k : sec.keys) {
      auto kv = it->second.find(k.name);
      if (kv != it->second.end()) out += k.name + " = " + kv->second + "\n";
    }
  }
  return out;
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string raw;
  std::size_t lineno = 0;
  const SectionSchema* current = nullptr;
  std::set<std::pair<std::string, std::string>> seen;
  auto fail = [&](const std::string& msg) {
    throw ConfigError("line " + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("malformed section header '" + line + "'");
      const std::string name = trim(line.substr(1, line.size() - 2));
      current = find_section(name);
      if (!current) fail("unknown section [" + name + "]");
      if (cfg.values_.count(name)) fail("duplicate section [" + name + "]");
      cfg.values_[name];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected 'key = value'");
    if (!current) fail("key outside of any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const KeySchema* ks = find_key(*current, key);
    if (!ks) fail("unknown key '" + key + "' in section [" + current->name + "]");
    if (!seen.insert({current->name, key}).second)
      fail("duplicate key '" + key + "' in section [" + current->name + "]");
    if (!valid_value(ks->type, value))
      fail("malformed value '" + value + "' for key '" + key + "'");
    cfg.values_[current->name][key] = value;
  }

  if (!cfg.has_section("experiment")) throw ConfigError("missing section [experiment]");
  if (!cfg.has("experiment", "kind")) throw ConfigError("missing key 'kind' in section [experiment]");
  const ExperimentKind kind = cfg.kind();
  for (const auto& req : required_sections(kind))
    if (!cfg.has_section(req)) throw ConfigError("missing section [" + req + "]");
  if (kind != ExperimentKind::NoiseGen && !cfg.has("drift", "family"))
    throw ConfigError("missing key 'family' in section [drift]");

  // Fill defaults for every section so the echo is complete.
  for (const auto& sec : config_schema()) {
    auto& m = cfg.values_[sec.name];
    for (const auto& k : sec.keys)
      if (!m.count(k.name) && k.fallback) m[k.name] = *k.fallback;
  }
  if (kind == ExperimentKind::NoiseGen) cfg.values_.erase("drift");
  return cfg;
}

}  // namespace af
