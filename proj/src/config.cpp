#include "config.hpp"

#include "errors.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace escapelab {

namespace {

enum class Type { Real, RealAuto, Int, UInt, Bool, Enum, String, RealList };

struct KeySpec {
  const char* key;
  Type type;
  const char* default_value;
  const char* choices;  // '|' separated, enums only
};

const std::vector<KeySpec>& schema() {
  static const std::vector<KeySpec> s = {
      {"geometry.kind", Type::Enum, "hyperbolic", "hyperbolic|euclidean"},
      {"geometry.n", Type::Int, "1", nullptr},
      {"geometry.epsilon0", Type::RealAuto, "auto", nullptr},
      {"geometry.core_radius", Type::RealAuto, "auto", nullptr},
      {"geometry.core_margin", Type::Real, "0.5", nullptr},
      {"group.kind", Type::Enum, "cyclic", "trivial|cyclic|symmetric|file"},
      {"group.generators", Type::Int, "2", nullptr},
      {"group.length", Type::Real, "2", nullptr},
      {"group.file", Type::String, "", nullptr},
      {"dynamics.t_grid", Type::RealList, "0:8:0.5", nullptr},
      {"dynamics.samples", Type::Int, "100000", nullptr},
      {"dynamics.seed", Type::UInt, "0", nullptr},
      {"dynamics.fit_t_min", Type::Real, "2", nullptr},
      {"dynamics.fit_t_max", Type::RealAuto, "auto", nullptr},
      {"dynamics.min_surviving", Type::Int, "50", nullptr},
      {"dynamics.lambda0", Type::Real, "1.05", nullptr},
      {"dynamics.delta_method", Type::Enum, "both", "both|bisection|orbit-count"},
      {"dynamics.max_word_length", Type::Int, "0", nullptr},
      {"dynamics.orbit_budget", Type::Int, "5000000", nullptr},
      {"dynamics.delta_margin", Type::Real, "0.02", nullptr},
      {"dynamics.compare_delta", Type::Bool, "true", nullptr},
      {"measures.tolerance", Type::Real, "1e-8", nullptr},
      {"measures.word_length", Type::Int, "12", nullptr},
      {"measures.points", Type::Int, "48", nullptr},
      {"measures.t_max", Type::Real, "60", nullptr},
      {"measures.xi_angles", Type::RealList, "0.5,1.5,2.5", nullptr},
      {"measures.symbol_center", Type::RealList, "0,0.3", nullptr},
      {"measures.symbol_radius", Type::Real, "0.4", nullptr},
      {"measures.fiber", Type::Enum, "directional", "constant|directional|gaussian|bump"},
      {"measures.fiber_angle", Type::Real, "0.5", nullptr},
      {"measures.fiber_power", Type::Int, "1", nullptr},
      {"measures.fiber_center", Type::RealList, "0,0", nullptr},
      {"measures.fiber_width", Type::Real, "1", nullptr},
      {"measures.base_shape", Type::Enum, "bump", "bump|gaussian"},
      {"measures.boundary_points", Type::Int, "32", nullptr},
      {"measures.mc_samples", Type::Int, "200000", nullptr},
      {"measures.t_escape", Type::Real, "30", nullptr},
      {"semiclassics.h_list", Type::RealList, "0.1,0.05,0.025,0.0125", nullptr},
      {"semiclassics.quantization", Type::Enum, "left", "left|weyl"},
      {"semiclassics.lambda", Type::Real, "1", nullptr},
      {"semiclassics.points", Type::Int, "96", nullptr},
      {"semiclassics.xi_angle", Type::Real, "0", nullptr},
      {"semiclassics.symbol_center", Type::RealList, "0,0.05", nullptr},
      {"semiclassics.symbol_radius", Type::Real, "0.3", nullptr},
      {"semiclassics.fiber", Type::Enum, "gaussian", "gaussian|bump"},
      {"semiclassics.fiber_center", Type::RealList, "2,0", nullptr},
      {"semiclassics.fiber_width", Type::Real, "2", nullptr},
      {"semiclassics.base_shape", Type::Enum, "bump", "bump|gaussian"},
      {"semiclassics.energy", Type::Real, "1", nullptr},
      {"semiclassics.tolerance", Type::Real, "1e-8", nullptr},
      {"output.directory", Type::String, "runs", nullptr},
      {"output.format", Type::Enum, "both", "csv|json|both"},
  };
  return s;
}

const KeySpec& spec_for(const std::string& key) {
  for (const KeySpec& k : schema()) {
    if (key == k.key) return k;
  }
  throw ValidationError("unknown configuration key '" + key + "'");
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool parse_real(const std::string& s, double& out) {
  std::string t = trim(s);
  if (t.empty()) return false;
  const char* first = t.data();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), out);
  return ec == std::errc() && ptr == t.data() + t.size() && std::isfinite(out);
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::string v = trim(value);
  if (v.empty()) return out;
  if (v.find(':') != std::string::npos) {
    std::vector<double> parts;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ':')) {
      double x;
      if (!parse_real(item, x)) throw ValidationError(key + ": bad range '" + value + "'");
      parts.push_back(x);
    }
    if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0]) {
      throw ValidationError(key + ": range must be start:stop:step with step > 0");
    }
    auto n = static_cast<long>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9)) + 1;
    if (n > 100000) throw ValidationError(key + ": range has too many points");
    for (long i = 0; i < n; ++i) out.push_back(parts[0] + static_cast<double>(i) * parts[2]);
    return out;
  }
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double x;
    if (!parse_real(item, x)) throw ValidationError(key + ": bad number '" + trim(item) + "'");
    out.push_back(x);
  }
  return out;
}

std::string normalise(const KeySpec& spec, const std::string& value_in) {
  const std::string key = spec.key;
  std::string value = trim(value_in);
  switch (spec.type) {
    case Type::RealAuto:
      if (value == "auto") return value;
      [[fallthrough]];
    case Type::Real: {
      double x;
      if (!parse_real(value, x)) throw ValidationError(key + ": expected a real number, got '" + value + "'");
      return format_real(x);
    }
    case Type::Int: {
      long long x;
      auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), x);
      if (value.empty() || ec != std::errc() || ptr != value.data() + value.size()) {
        throw ValidationError(key + ": expected an integer, got '" + value + "'");
      }
      return std::to_string(x);
    }
    case Type::UInt: {
      unsigned long long x;
      auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), x);
      if (value.empty() || ec != std::errc() || ptr != value.data() + value.size()) {
        throw ValidationError(key + ": expected an unsigned 64-bit integer, got '" + value + "'");
      }
      return std::to_string(x);
    }
    case Type::Bool:
      if (value == "true" || value == "1" || value == "yes") return "true";
      if (value == "false" || value == "0" || value == "no") return "false";
      throw ValidationError(key + ": expected true or false, got '" + value + "'");
    case Type::Enum: {
      std::stringstream ss(spec.choices);
      std::string c;
      while (std::getline(ss, c, '|')) {
        if (c == value) return value;
      }
      throw ValidationError(key + ": '" + value + "' is not one of " + spec.choices);
    }
    case Type::String:
      return value;
    case Type::RealList: {
      std::vector<double> xs = parse_list(key, value);
      std::string out;
      for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + format_real(xs[i]);
      return out;
    }
  }
  return value;
}

void check_semantics(const std::map<std::string, std::string>& v) {
  if (v.at("geometry.n") != "1") throw ValidationError("geometry.n: only n = 1 is implemented");
  if (v.at("group.kind") == "file" && v.at("group.file").empty()) {
    throw ValidationError("group.file is required when group.kind = file");
  }
}

}  // namespace

ExperimentConfig::ExperimentConfig() {
  for (const KeySpec& k : schema()) values_[k.key] = normalise(k, k.default_value);
}

ExperimentConfig ExperimentConfig::parse(const std::string& text, const std::string& base_dir) {
  ExperimentConfig cfg;
  cfg.base_dir_ = base_dir;
  std::stringstream ss(text);
  std::string line, section;
  std::map<std::string, int> seen;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto where = [&] { return "line " + std::to_string(lineno) + ": "; };
    if (line.front() == '[') {
      if (line.back() != ']') throw ValidationError(where() + "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      static const char* sections[] = {"geometry", "group", "dynamics", "measures", "semiclassics", "output"};
      if (std::find(std::begin(sections), std::end(sections), section) == std::end(sections)) {
        throw ValidationError(where() + "unknown section [" + section + "]");
      }
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ValidationError(where() + "expected key = value");
    if (section.empty()) throw ValidationError(where() + "key outside any section");
    std::string key = section + "." + trim(line.substr(0, eq));
    if (seen.count(key)) {
      throw ValidationError(where() + "duplicate key '" + key + "' (first on line " + std::to_string(seen[key]) + ")");
    }
    seen[key] = lineno;
    try {
      cfg.set(key, line.substr(eq + 1));
    } catch (const ValidationError& e) {
      throw ValidationError(where() + e.what());
    }
  }
  check_semantics(cfg.values_);
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  std::filesystem::path p(path);
  std::string dir = p.has_parent_path() ? p.parent_path().string() : ".";
  try {
    return parse(buf.str(), dir);
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  const KeySpec& spec = spec_for(key);
  values_[key] = normalise(spec, value);
}

bool ExperimentConfig::has_key(const std::string& key) const { return values_.count(key) > 0; }

const std::string& ExperimentConfig::raw(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ValidationError("unknown configuration key '" + key + "'");
  return it->second;
}

double ExperimentConfig::real(const std::string& key) const {
  const std::string& v = raw(key);
  if (v == "auto") throw ValidationError(key + " is auto; no value available");
  return std::stod(v);
}

std::int64_t ExperimentConfig::integer(const std::string& key) const { return std::stoll(raw(key)); }

std::uint64_t ExperimentConfig::unsigned_integer(const std::string& key) const { return std::stoull(raw(key)); }

bool ExperimentConfig::boolean(const std::string& key) const { return raw(key) == "true"; }

std::vector<double> ExperimentConfig::reals(const std::string& key) const { return parse_list(key, raw(key)); }

bool ExperimentConfig::is_auto(const std::string& key) const { return raw(key) == "auto"; }

std::string ExperimentConfig::resolve_path(const std::string& path) const {
  std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(base_dir_) / p).string();
}

std::string ExperimentConfig::canonical() const {
  std::string out;
  for (const KeySpec& k : schema()) out += std::string(k.key) + " = " + values_.at(k.key) + "\n";
  return out;
}

std::string ExperimentConfig::hash() const { return sha256_hex(canonical()); }

std::vector<std::string> ExperimentConfig::keys() {
  std::vector<std::string> out;
  for (const KeySpec& k : schema()) out.emplace_back(k.key);
  return out;
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

}  // namespace escapelab
