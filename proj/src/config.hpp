#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace escapelab {

// Sectioned key = value configuration checked against a fixed schema. Every
// schema key has a default, so the canonical text (and its hash) covers the
// full effective configuration.
class ExperimentConfig {
 public:
  ExperimentConfig();

  // Throws ValidationError naming the line for syntax errors, unknown keys,
  // duplicates and ill-typed values.
  static ExperimentConfig parse(const std::string& text, const std::string& base_dir = ".");
  static ExperimentConfig load(const std::string& path);

  // key is "section.key"; the value is validated and normalised.
  void set(const std::string& key, const std::string& value);
  bool has_key(const std::string& key) const;

  const std::string& raw(const std::string& key) const;
  double real(const std::string& key) const;
  std::int64_t integer(const std::string& key) const;
  std::uint64_t unsigned_integer(const std::string& key) const;
  bool boolean(const std::string& key) const;
  std::vector<double> reals(const std::string& key) const;
  bool is_auto(const std::string& key) const;

  // Group files are resolved against the directory of the config file.
  std::string resolve_path(const std::string& path) const;
  const std::string& base_dir() const { return base_dir_; }

  // One "section.key = value" line per schema key, in schema order.
  std::string canonical() const;
  // SHA-256 of canonical(), lowercase hex.
  std::string hash() const;

  static std::vector<std::string> keys();

 private:
  std::map<std::string, std::string> values_;
  std::string base_dir_ = ".";
};

std::string sha256_hex(const std::string& data);

}  // namespace escapelab
