#pragma once

// Experiment configs: `key = value` lines, `#` comments, file references prefixed with `@`.

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "cantor/basic_sequence.hpp"
#include "cantor/error.hpp"
#include "cantor/rational.hpp"

namespace cantor::experiment {

inline constexpr std::array<std::string_view, 6> kOperations{"example", "phi", "main", "transform", "multiply", "stats"};

inline constexpr std::array<std::string_view, 16> kKeys{"name",  "operation", "P",     "Q",      "N",
                                                        "seed",  "input",     "a",     "b",      "c",
                                                        "k",     "block",     "stride", "max_multiplier",
                                                        "driver", "chooser"};

struct ExperimentConfig {
  std::string name;
  std::string operation;
  std::uint64_t length = 0;  // N
  std::uint64_t seed = 0;
  std::map<std::string, std::string> values;  // every key as written, trimmed
  std::filesystem::path base_dir;             // resolves relative `@` references

  bool has(const std::string& key) const { return values.count(key) != 0; }

  const std::string& get(const std::string& key) const {
    auto it = values.find(key);
    if (it == values.end()) throw Error(ErrorCode::ParseError, "config '" + name + "' needs key '" + key + "'");
    return it->second;
  }

  std::string get_or(const std::string& key, std::string fallback) const {
    auto it = values.find(key);
    return it == values.end() ? fallback : it->second;
  }

  BigInt integer(const std::string& key) const {
    try {
      return parse_bigint(get(key));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ParseError || !has(key)) throw;
      throw Error(ErrorCode::ParseError, "key '" + key + "' is not an integer: " + get(key));
    }
  }

  BigInt integer_or(const std::string& key, long fallback) const { return has(key) ? integer(key) : BigInt(fallback); }

  BasicSequence sequence(const std::string& key) const { return BasicSequence::parse(get(key), base_dir); }

  std::optional<std::filesystem::path> input() const {
    if (!has("input")) return std::nullopt;
    std::string_view v = get("input");
    if (v.empty() || v.front() != '@') throw Error(ErrorCode::ParseError, "input must be a file reference '@path'");
    std::filesystem::path p(std::string(v.substr(1)));
    return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  }

  /// Canonical `key=value` lines in key order: the hashed identity of a run.
  std::string canonical() const {
    std::string s;
    for (const auto& [k, v] : values) s += k + "=" + v + "\n";
    return s;
  }
};

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string config_hash(const ExperimentConfig& c) {
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << fnv1a(c.canonical());
  return out.str();
}

inline ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {}) {
  ExperimentConfig c;
  c.base_dir = base_dir;
  std::size_t line_no = 0;
  for (auto raw : cantor::detail::split(text, '\n')) {
    ++line_no;
    auto line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = cantor::detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key(cantor::detail::trim(line.substr(0, eq)));
    const std::string value(cantor::detail::trim(line.substr(eq + 1)));
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    if (c.values.count(key)) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    c.values[key] = value;
  }
  c.name = c.get("name");
  if (c.name.empty() || c.name.find_first_of("/\\ ") != std::string::npos) {
    throw Error(ErrorCode::ParseError, "name must be non-empty without spaces or slashes");
  }
  c.operation = c.get("operation");
  if (std::find(kOperations.begin(), kOperations.end(), c.operation) == kOperations.end()) {
    throw Error(ErrorCode::ParseError, "unknown operation '" + c.operation + "'");
  }
  const BigInt seed = c.integer("seed");
  if (!fits_u64(seed)) throw Error(ErrorCode::ParseError, "seed must be a 64-bit unsigned integer");
  c.seed = to_u64(seed);
  const BigInt n = c.integer("N");
  if (n < 1 || !fits_u64(n)) throw Error(ErrorCode::ParseError, "N must be a positive 64-bit integer");
  c.length = to_u64(n);
  return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path());
}

}  // namespace cantor::experiment
