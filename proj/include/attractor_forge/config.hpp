#pragma once

// Experiment configuration: `[section]` headers and `key = value` lines,
// validated against a fixed schema. Values are kept as validated text so a
// parse -> serialize -> parse round trip is the identity.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace af {

enum class ExperimentKind { Certify, Simulate, Pullback, Rates, NoiseGen };

std::string to_string(ExperimentKind k);
ExperimentKind experiment_kind_from_string(const std::string& s);

enum class ValueType { Number, Integer, Text, NumberList, NumberOrAuto };

struct KeySchema {
  std::string name;
  ValueType type;
  std::optional<std::string> fallback;  // default; absent = optional without default
};

struct SectionSchema {
  std::string name;
  std::vector<KeySchema> keys;
};

const std::vector<SectionSchema>& config_schema();

class ExperimentConfig {
public:
  bool has_section(const std::string& section) const;
  bool has(const std::string& section, const std::string& key) const;
  const std::string& text(const std::string& section, const std::string& key) const;
  double number(const std::string& section, const std::string& key) const;
  std::int64_t integer(const std::string& section, const std::string& key) const;
  std::vector<double> numbers(const std::string& section, const std::string& key) const;
  // nullopt for "auto"
  std::optional<double> number_or_auto(const std::string& section, const std::string& key) const;

  void set(const std::string& section, const std::string& key, const std::string& value);

  ExperimentKind kind() const;
  std::uint64_t seed() const;

  // Canonical text: schema order, one `key = value` per line.
  std::string serialize() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;

private:
  friend ExperimentConfig parse_config(const std::string& text);
  std::map<std::string, std::map<std::string, std::string>> values_;
};

// Throws ConfigError ("line N: ...") on unknown section/key, duplicate key,
// malformed value, or a missing required section.
ExperimentConfig parse_config(const std::string& text);

}  // namespace af
