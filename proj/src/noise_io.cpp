#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "attractor_forge/errors.hpp"
#include "attractor_forge/noise.hpp"

namespace af {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += fmt(v[i]);
  }
  return s;
}

std::vector<double> split_numbers(const std::string& s) {
  std::vector<double> out;
  if (s.empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ConfigError("noise file: malformed number '" + item + "'");
    }
    if (used != item.size()) throw ConfigError("noise file: malformed number '" + item + "'");
    out.push_back(v);
  }
  return out;
}

double to_double(const std::map<std::string, std::string>& kv, const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end()) throw ConfigError("noise file: missing header key '" + key + "'");
  auto v = split_numbers(it->second);
  if (v.size() != 1) throw ConfigError("noise file: header key '" + key + "' is not a number");
  return v[0];
}

}  // namespace

void write_noise(std::ostream& os, const NoisePath& path) {
  const auto& s = path.spec;
  os << "# kind=" << to_string(s.kind) << " seed=" << path.seed << " dt=" << fmt(path.dt)
     << " t0=" << fmt(path.t_start) << " t1=" << fmt(path.t_end()) << " modes=" << s.mode_count()
     << "\n";
  os << "# n=" << path.grid.n_interior() << " length=" << fmt(path.grid.length())
     << " cholesky_fallback=" << (path.cholesky_fallback ? 1 : 0) << "\n";
  os << "# weights=" << join(s.mode_weights) << " hurst=" << fmt(s.hurst) << "\n";
  os << "# drift=" << join(s.drift_modes) << " jump_rate=" << fmt(s.jump_rate)
     << " jump_mode=" << s.jump_mode << " jump_law=" << to_string(s.jump_law)
     << " jump_mean=" << fmt(s.jump_mean) << " jump_spread=" << fmt(s.jump_spread) << "\n";
  const std::size_t n = path.grid.n_interior();
  std::string line;
  for (std::size_t i = 0; i < path.count; ++i) {
    line = fmt(path.time(i));
    for (std::size_t x = 0; x < n; ++x) {
      line += ' ';
      line += fmt(path.data[i * n + x]);
    }
    line += '\n';
    os << line;
  }
}

NoisePath read_noise(std::istream& is) {
  std::map<std::string, std::string> kv;
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      // Only lines made entirely of key=value tokens are path metadata; other
      // comment lines (provenance, config echo) are skipped.
      std::stringstream ss(line.substr(1));
      std::string tok;
      std::vector<std::pair<std::string, std::string>> pairs;
      bool metadata = true;
      while (ss >> tok) {
        auto eq = tok.find('=');
        if (eq == std::string::npos || eq == 0) {
          metadata = false;
          break;
        }
        pairs.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
      }
      if (metadata)
        for (auto& [k, v] : pairs) kv[k] = v;
      continue;
    }
    rows.push_back(line);
  }

  NoisePath p;
  p.spec.kind = noise_kind_from_string(kv.count("kind") ? kv["kind"] : "");
  p.seed = static_cast<std::uint64_t>(std::stoull(kv.count("seed") ? kv["seed"] : "0"));
  p.dt = to_double(kv, "dt");
  p.t_start = to_double(kv, "t0");
  const auto n = static_cast<std::size_t>(to_double(kv, "n"));
  p.grid = SpatialGrid(n, to_double(kv, "length"));
  p.cholesky_fallback = kv.count("cholesky_fallback") && kv["cholesky_fallback"] == "1";
  p.spec.mode_weights = split_numbers(kv["weights"]);
  p.spec.hurst = to_double(kv, "hurst");
  p.spec.drift_modes = split_numbers(kv["drift"]);
  p.spec.jump_rate = to_double(kv, "jump_rate");
  p.spec.jump_mode = static_cast<std::size_t>(to_double(kv, "jump_mode"));
  p.spec.jump_law = jump_law_from_string(kv["jump_law"]);
  p.spec.jump_mean = to_double(kv, "jump_mean");
  p.spec.jump_spread = to_double(kv, "jump_spread");

  p.count = rows.size();
  if (p.count == 0) throw ConfigError("noise file: no data rows");
  p.data.reserve(p.count * n);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::stringstream ss(rows[i]);
    std::string tok;
    std::vector<double> vals;
    while (ss >> tok) {
      auto v = split_numbers(tok);
      vals.push_back(v.at(0));
    }
    if (vals.size() != n + 1)
      throw ConfigError("noise file: row " + std::to_string(i) + " has " +
                        std::to_string(vals.size()) + " columns, expected " +
                        std::to_string(n + 1));
    p.data.insert(p.data.end(), vals.begin() + 1, vals.end());
  }
  const double t1 = to_double(kv, "t1");
  if (std::abs(p.t_end() - t1) > 1e-9 * std::max(1.0, std::abs(t1)))
    throw ConfigError("noise file: row count does not match the header window");
  return p;
}

}  // namespace af
