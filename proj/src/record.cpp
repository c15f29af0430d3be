#include "record.hpp"

#include "errors.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace escapelab {

namespace {

using json = nlohmann::ordered_json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const Cell& c) {
  if (auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  if (auto* d = std::get_if<double>(&c)) return format_double(*d);
  if (auto* b = std::get_if<bool>(&c)) return *b ? "true" : "false";
  const std::string& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

json cell_to_json(const Cell& c) {
  if (auto* i = std::get_if<std::int64_t>(&c)) return *i;
  if (auto* d = std::get_if<double>(&c)) return std::isfinite(*d) ? json(*d) : json(format_double(*d));
  if (auto* b = std::get_if<bool>(&c)) return *b;
  return std::get<std::string>(c);
}

Cell cell_from_json(const json& j) {
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number_float()) return j.get<double>();
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  throw FormatError("unsupported cell value " + j.dump());
}

template <class T>
T field(const json& j, const char* name) {
  if (!j.contains(name)) throw FormatError(std::string("run record is missing '") + name + "'");
  try {
    return j.at(name).get<T>();
  } catch (const json::exception&) {
    throw FormatError(std::string("run record field '") + name + "' has the wrong type");
  }
}

}  // namespace

void RunRecord::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw Error("row width does not match the column list");
  rows.push_back(std::move(row));
}

void RunRecord::warn(const std::string& code, const std::string& message) { warnings.push_back({code, message}); }

const Cell* RunRecord::summary_value(const std::string& key) const {
  for (const auto& [k, v] : summary) {
    if (k == key) return &v;
  }
  return nullptr;
}

std::string make_run_id(const std::string& command, const std::string& config_hash, std::uint64_t seed) {
  return command + "-" + config_hash.substr(0, 8) + "-" + std::to_string(seed);
}

std::string utc_timestamp() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string to_csv(const RunRecord& r) {
  std::string out;
  for (std::size_t i = 0; i < r.columns.size(); ++i) out += (i ? "," : "") + csv_field(r.columns[i]);
  out += "\n";
  for (const auto& row : r.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_field(row[i]);
    out += "\n";
  }
  return out;
}

std::string to_json(const RunRecord& r) {
  json j;
  j["schema"] = RunRecord::kSchema;
  j["run_id"] = r.run_id;
  j["command"] = r.command;
  j["config_hash"] = r.config_hash;
  j["config"] = r.config;
  j["seed"] = r.seed;
  j["started"] = r.started;
  j["finished"] = r.finished;
  j["columns"] = r.columns;
  json rows = json::array();
  for (const auto& row : r.rows) {
    json jr = json::array();
    for (const Cell& c : row) jr.push_back(cell_to_json(c));
    rows.push_back(std::move(jr));
  }
  j["rows"] = std::move(rows);
  json summary = json::object();
  for (const auto& [k, v] : r.summary) summary[k] = cell_to_json(v);
  j["summary"] = std::move(summary);
  json warnings = json::array();
  for (const Warning& w : r.warnings) warnings.push_back({{"code", w.code}, {"message", w.message}});
  j["warnings"] = std::move(warnings);
  return j.dump(2) + "\n";
}

RunRecord record_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("run record is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("schema")) throw FormatError("run record has no schema version");
  if (!j["schema"].is_number_integer() || j["schema"].get<int>() != RunRecord::kSchema) {
    throw FormatError("unsupported run record schema " + j["schema"].dump() + " (expected " +
                      std::to_string(RunRecord::kSchema) + ")");
  }
  RunRecord r;
  r.run_id = field<std::string>(j, "run_id");
  r.command = field<std::string>(j, "command");
  r.config_hash = field<std::string>(j, "config_hash");
  r.config = field<std::string>(j, "config");
  r.seed = field<std::uint64_t>(j, "seed");
  r.started = field<std::string>(j, "started");
  r.finished = field<std::string>(j, "finished");
  r.columns = field<std::vector<std::string>>(j, "columns");
  if (!j.contains("rows") || !j["rows"].is_array()) throw FormatError("run record is missing 'rows'");
  for (const json& jr : j["rows"]) {
    if (!jr.is_array() || jr.size() != r.columns.size()) throw FormatError("row width does not match the columns");
    std::vector<Cell> row;
    for (const json& c : jr) row.push_back(cell_from_json(c));
    r.rows.push_back(std::move(row));
  }
  if (!j.contains("summary") || !j["summary"].is_object()) throw FormatError("run record is missing 'summary'");
  for (const auto& [k, v] : j["summary"].items()) r.summary.emplace_back(k, cell_from_json(v));
  if (!j.contains("warnings") || !j["warnings"].is_array()) throw FormatError("run record is missing 'warnings'");
  for (const json& w : j["warnings"]) r.warnings.push_back({field<std::string>(w, "code"), field<std::string>(w, "message")});
  return r;
}

OutputFormat parse_output_format(const std::string& s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  if (s == "both") return OutputFormat::Both;
  throw ValidationError("unknown output format '" + s + "' (expected csv, json or both)");
}

std::vector<std::string> persist(const RunRecord& r, const std::string& dir, OutputFormat format) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory '" + dir + "': " + ec.message());
  std::vector<std::string> written;
  auto write = [&](const std::string& ext, const std::string& body) {
    std::string path = (std::filesystem::path(dir) / (r.run_id + ext)).string();
    std::ofstream out(path, std::ios::binary);
    out << body;
    if (!out) throw Error("cannot write '" + path + "'");
    written.push_back(path);
  };
  if (format != OutputFormat::Csv) write(".json", to_json(r));
  if (format != OutputFormat::Json) write(".csv", to_csv(r));
  return written;
}

RunRecord load_record(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open run record '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return record_from_json(buf.str());
}

RunRecord load_run(const std::string& dir, const std::string& run_id) {
  return load_record((std::filesystem::path(dir) / (run_id + ".json")).string());
}

}  // namespace escapelab
