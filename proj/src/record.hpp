#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace escapelab {

using Cell = std::variant<std::int64_t, double, std::string, bool>;

struct Warning {
  std::string code;  // truncation, non-convergence, dropped-samples, limsup-vs-lim, core-reentry, ...
  std::string message;
  bool operator==(const Warning&) const = default;
};

struct RunRecord {
  static constexpr int kSchema = 1;

  std::string run_id;
  std::string command;
  std::string config_hash;
  std::string config;  // canonical configuration text
  std::uint64_t seed = 0;
  std::string started;
  std::string finished;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::pair<std::string, Cell>> summary;
  std::vector<Warning> warnings;

  void add_row(std::vector<Cell> row);
  void warn(const std::string& code, const std::string& message);
  const Cell* summary_value(const std::string& key) const;

  bool operator==(const RunRecord&) const = default;
};

std::string make_run_id(const std::string& command, const std::string& config_hash, std::uint64_t seed);
std::string utc_timestamp();

// '.' decimal, header row, doubles as %.17g, RFC 4180 quoting for strings.
std::string to_csv(const RunRecord& r);
std::string to_json(const RunRecord& r);
// Throws FormatError when the schema version or layout does not match.
RunRecord record_from_json(const std::string& text);

enum class OutputFormat { Csv, Json, Both };
OutputFormat parse_output_format(const std::string& s);

// Writes <dir>/<run_id>.json and/or <dir>/<run_id>.csv; returns the paths written.
std::vector<std::string> persist(const RunRecord& r, const std::string& dir, OutputFormat format);
RunRecord load_record(const std::string& path);
RunRecord load_run(const std::string& dir, const std::string& run_id);

}  // namespace escapelab
