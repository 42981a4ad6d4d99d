#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ssp/common.hpp"

namespace ssp {

// Flat key=value configuration.  '#' starts a comment, blank lines are
// ignored, keys match [A-Za-z0-9_.]+, later assignments win.  Typed getters
// throw ConfigError on missing keys or malformed values.
class Config {
 public:
  static Config from_file(const std::string& path);
  static Config from_string(const std::string& text);

  // Overlay one assignment (used for --set KEY=VALUE).
  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long get_long(const std::string& key) const;
  long get_long(const std::string& key, long fallback) const;
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key,
                         const std::string& fallback) const;
  // Comma-separated doubles, e.g. "0.2,0.1,0.05".
  std::vector<double> get_double_list(const std::string& key) const;
  std::vector<double> get_double_list(
      const std::string& key, const std::vector<double>& fallback) const;
  // Comma-separated position:mass atoms, e.g. "0:0.998,-3:0.001,3:0.001".
  std::vector<Atom> get_atoms(const std::string& key) const;
  std::vector<Atom> get_atoms(const std::string& key,
                              const std::vector<Atom>& fallback) const;

  // Rejects any stored key outside `allowed` (ConfigError).
  void require_known(const std::vector<std::string>& allowed) const;

  // Deterministic "key=value" lines sorted by key.
  std::string canonical() const;
  // FNV-1a 64-bit hash of canonical(), as 16 hex digits.
  std::string hash() const;

  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

// Writes <out_dir>/manifest.txt: config hash, seeds in use, and the resolved
// configuration.  Content is a pure function of its inputs so reruns are
// byte-identical.
void write_manifest(
    const std::string& out_dir, const Config& cfg,
    const std::vector<std::pair<std::string, unsigned long long>>& seeds);

}  // namespace ssp
