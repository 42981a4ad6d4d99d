#include "ssp/config.hpp"

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace ssp {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  for (char c : k)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.'))
      return false;
  return true;
}

double parse_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double x;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' is not a number: '" + v + "'");
  }
  if (pos != v.size())
    throw ConfigError("config: trailing junk in '" + key + "': '" + v + "'");
  return x;
}

long parse_long(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  long x;
  try {
    x = std::stol(v, &pos);
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' is not an integer: '" + v +
                      "'");
  }
  if (pos != v.size())
    throw ConfigError("config: trailing junk in '" + key + "': '" + v + "'");
  return x;
}

std::vector<std::string> split(const std::string& v, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(v);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  return out;
}

}  // namespace

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return from_string(buf.str());
}

Config Config::from_string(const std::string& text) {
  Config cfg;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::size_t hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line.erase(hash_pos);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(lineno) +
                        " has no '='");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!valid_key(key))
      throw ConfigError("config: bad key '" + key + "' on line " +
                        std::to_string(lineno));
    cfg.kv_[key] = value;
  }
  return cfg;
}

void Config::set(const std::string& key, const std::string& value) {
  if (!valid_key(key)) throw ConfigError("config: bad key '" + key + "'");
  kv_[key] = trim(value);
}

bool Config::has(const std::string& key) const { return kv_.count(key) > 0; }

double Config::get_double(const std::string& key) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) throw ConfigError("config: missing key '" + key + "'");
  return parse_double(key, it->second);
}

double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long Config::get_long(const std::string& key) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) throw ConfigError("config: missing key '" + key + "'");
  return parse_long(key, it->second);
}

long Config::get_long(const std::string& key, long fallback) const {
  return has(key) ? get_long(key) : fallback;
}

std::string Config::get_string(const std::string& key) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) throw ConfigError("config: missing key '" + key + "'");
  return it->second;
}

std::string Config::get_string(const std::string& key,
                               const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}

std::vector<double> Config::get_double_list(const std::string& key) const {
  const std::string v = get_string(key);
  std::vector<double> out;
  for (const std::string& part : split(v, ','))
    out.push_back(parse_double(key, part));
  if (out.empty()) throw ConfigError("config: empty list for '" + key + "'");
  return out;
}

std::vector<double> Config::get_double_list(
    const std::string& key, const std::vector<double>& fallback) const {
  return has(key) ? get_double_list(key) : fallback;
}

std::vector<Atom> Config::get_atoms(const std::string& key) const {
  const std::string v = get_string(key);
  std::vector<Atom> out;
  for (const std::string& part : split(v, ',')) {
    const std::size_t colon = part.find(':');
    if (colon == std::string::npos)
      throw ConfigError("config: atom '" + part + "' in '" + key +
                        "' needs position:mass");
    out.push_back({parse_double(key, trim(part.substr(0, colon))),
                   parse_double(key, trim(part.substr(colon + 1)))});
  }
  if (out.empty()) throw ConfigError("config: empty measure for '" + key + "'");
  return out;
}

std::vector<Atom> Config::get_atoms(const std::string& key,
                                    const std::vector<Atom>& fallback) const {
  return has(key) ? get_atoms(key) : fallback;
}

void Config::require_known(const std::vector<std::string>& allowed) const {
  for (const auto& [key, value] : kv_) {
    bool ok = false;
    for (const std::string& a : allowed)
      if (key == a) {
        ok = true;
        break;
      }
    if (!ok) throw ConfigError("config: unknown key '" + key + "'");
  }
}

std::string Config::canonical() const {
  std::string out;
  for (const auto& [key, value] : kv_) {
    out += key;
    out += '=';
    out += value;
    out += '\n';
  }
  return out;
}

std::string Config::hash() const {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

void write_manifest(
    const std::string& out_dir, const Config& cfg,
    const std::vector<std::pair<std::string, unsigned long long>>& seeds) {
  std::filesystem::create_directories(out_dir);
  const std::string path = out_dir + "/manifest.txt";
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError("manifest: cannot write '" + path + "'");
  out << "config_hash=" << cfg.hash() << "\n";
  for (const auto& [name, value] : seeds)
    out << "seed." << name << "=" << value << "\n";
  out << "config_begin\n" << cfg.canonical() << "config_end\n";
}

}  // namespace ssp
