#include "escapelab/escapelab.h"

#include "config.hpp"
#include "errors.hpp"
#include "experiments.hpp"
#include "record.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <string>
#include <utility>

using namespace escapelab;

struct el_config {
  ExperimentConfig cfg;
};

struct el_record {
  explicit el_record(RunRecord r) : rec(std::move(r)) {}
  RunRecord rec;
  std::string output_format = "both";
  mutable std::string scratch;
  mutable std::string description;
};

namespace {

thread_local std::string g_last_error;
thread_local int g_required_points = 0;

el_status fail(el_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <class F>
el_status guarded(F&& f) {
  g_last_error.clear();
  g_required_points = 0;
  try {
    f();
    return EL_OK;
  } catch (const ResolutionError& e) {
    g_required_points = e.required_points;
    return fail(EL_ERR_RESOLUTION, e.what());
  } catch (const ValidationError& e) {
    return fail(EL_ERR_VALIDATION, e.what());
  } catch (const DomainError& e) {
    return fail(EL_ERR_DOMAIN, e.what());
  } catch (const InvalidIsometryError& e) {
    return fail(EL_ERR_INVALID_ISOMETRY, e.what());
  } catch (const SignalError& e) {
    return fail(EL_ERR_SIGNAL, e.what());
  } catch (const PrecisionError& e) {
    return fail(EL_ERR_PRECISION, e.what());
  } catch (const ReductionError& e) {
    return fail(EL_ERR_REDUCTION, e.what());
  } catch (const FormatError& e) {
    return fail(EL_ERR_FORMAT, e.what());
  } catch (const std::exception& e) {
    return fail(EL_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(EL_ERR_INTERNAL, "unknown failure");
  }
}

el_status copy_out(const std::string& s, char* buf, size_t len, size_t* needed) {
  if (needed) *needed = s.size() + 1;
  if (!buf || len < s.size() + 1) return fail(EL_ERR_ARGUMENT, "buffer too small");
  std::memcpy(buf, s.c_str(), s.size() + 1);
  return EL_OK;
}

const Cell* cell_at(const el_record* r, size_t row, size_t col) {
  if (!r || row >= r->rec.rows.size() || col >= r->rec.columns.size()) return nullptr;
  return &r->rec.rows[row][col];
}

double numeric(const Cell& c) {
  if (auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
  if (auto* d = std::get_if<double>(&c)) return *d;
  if (auto* b = std::get_if<bool>(&c)) return *b ? 1.0 : 0.0;
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

extern "C" {

const char* el_version(void) { return "0.1.0"; }

const char* el_status_name(el_status s) {
  switch (s) {
    case EL_OK: return "ok";
    case EL_ERR_VALIDATION: return "validation error";
    case EL_ERR_DOMAIN: return "domain error";
    case EL_ERR_INVALID_ISOMETRY: return "invalid isometry";
    case EL_ERR_SIGNAL: return "insufficient signal";
    case EL_ERR_PRECISION: return "precision error";
    case EL_ERR_RESOLUTION: return "resolution error";
    case EL_ERR_REDUCTION: return "reduction error";
    case EL_ERR_FORMAT: return "format error";
    case EL_ERR_UNKNOWN_COMMAND: return "unknown command";
    case EL_ERR_ARGUMENT: return "invalid argument";
    case EL_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* el_last_error(void) { return g_last_error.c_str(); }

int el_last_required_points(void) { return g_required_points; }

int el_exit_code(el_status s) {
  switch (s) {
    case EL_OK: return 0;
    case EL_ERR_VALIDATION:
    case EL_ERR_DOMAIN:
    case EL_ERR_INVALID_ISOMETRY:
    case EL_ERR_FORMAT:
    case EL_ERR_ARGUMENT: return 2;
    case EL_ERR_SIGNAL:
    case EL_ERR_PRECISION:
    case EL_ERR_RESOLUTION: return 3;
    case EL_ERR_UNKNOWN_COMMAND: return 64;
    default: return 1;
  }
}

const char* el_commands(void) {
  static const std::string joined = [] {
    std::string s;
    for (const auto& c : experiment_commands()) s += (s.empty() ? "" : " ") + c;
    return s;
  }();
  return joined.c_str();
}

el_status el_config_default(el_config** out) {
  if (!out) return fail(EL_ERR_ARGUMENT, "null output handle");
  return guarded([&] { *out = new el_config{ExperimentConfig()}; });
}

el_status el_config_load(const char* path, el_config** out) {
  if (!path || !out) return fail(EL_ERR_ARGUMENT, "null argument");
  return guarded([&] { *out = new el_config{ExperimentConfig::load(path)}; });
}

el_status el_config_parse(const char* text, const char* base_dir, el_config** out) {
  if (!text || !out) return fail(EL_ERR_ARGUMENT, "null argument");
  return guarded([&] { *out = new el_config{ExperimentConfig::parse(text, base_dir ? base_dir : ".")}; });
}

el_status el_config_set(el_config* cfg, const char* key, const char* value) {
  if (!cfg || !key || !value) return fail(EL_ERR_ARGUMENT, "null argument");
  return guarded([&] { cfg->cfg.set(key, value); });
}

el_status el_config_get(const el_config* cfg, const char* key, const char** value) {
  if (!cfg || !key || !value) return fail(EL_ERR_ARGUMENT, "null argument");
  return guarded([&] { *value = cfg->cfg.raw(key).c_str(); });
}

el_status el_config_canonical(const el_config* cfg, char* buf, size_t len, size_t* needed) {
  if (!cfg) return fail(EL_ERR_ARGUMENT, "null config");
  return copy_out(cfg->cfg.canonical(), buf, len, needed);
}

el_status el_config_hash(const el_config* cfg, char* buf, size_t len) {
  if (!cfg) return fail(EL_ERR_ARGUMENT, "null config");
  std::string h;
  el_status s = guarded([&] { h = cfg->cfg.hash(); });
  if (s != EL_OK) return s;
  return copy_out(h, buf, len, nullptr);
}

void el_config_free(el_config* cfg) { delete cfg; }

el_status el_run(const char* command, const el_config* cfg, const el_run_options* opts, el_record** out) {
  if (!command || !cfg || !out) return fail(EL_ERR_ARGUMENT, "null argument");
  if (!is_experiment(command)) {
    return fail(EL_ERR_UNKNOWN_COMMAND, std::string("unknown subcommand '") + command + "'");
  }
  return guarded([&] {
    RunOptions o;
    if (opts) {
      if (opts->has_seed) o.seed = opts->seed;
      o.threads = opts->threads;
    }
    auto* r = new el_record(run_experiment(command, cfg->cfg, o));
    r->output_format = cfg->cfg.raw("output.format");
    *out = r;
  });
}

el_status el_record_write(const el_record* rec, const char* dir, el_format format) {
  if (!rec || !dir) return fail(EL_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    OutputFormat f = format == EL_FORMAT_CSV    ? OutputFormat::Csv
                     : format == EL_FORMAT_JSON ? OutputFormat::Json
                     : format == EL_FORMAT_BOTH ? OutputFormat::Both
                                                : parse_output_format(rec->output_format);
    persist(rec->rec, dir, f);
  });
}

el_status el_record_load(const char* path, el_record** out) {
  if (!path || !out) return fail(EL_ERR_ARGUMENT, "null argument");
  return guarded([&] { *out = new el_record(load_record(path)); });
}

el_status el_record_load_run(const char* dir, const char* run_id, el_record** out) {
  if (!dir || !run_id || !out) return fail(EL_ERR_ARGUMENT, "null argument");
  return guarded([&] { *out = new el_record(load_run(dir, run_id)); });
}

void el_record_free(el_record* rec) { delete rec; }

const char* el_record_run_id(const el_record* r) { return r ? r->rec.run_id.c_str() : ""; }
const char* el_record_command(const el_record* r) { return r ? r->rec.command.c_str() : ""; }
const char* el_record_config_hash(const el_record* r) { return r ? r->rec.config_hash.c_str() : ""; }
const char* el_record_config(const el_record* r) { return r ? r->rec.config.c_str() : ""; }
uint64_t el_record_seed(const el_record* r) { return r ? r->rec.seed : 0; }
size_t el_record_columns(const el_record* r) { return r ? r->rec.columns.size() : 0; }
size_t el_record_rows(const el_record* r) { return r ? r->rec.rows.size() : 0; }

const char* el_record_column_name(const el_record* r, size_t col) {
  if (!r || col >= r->rec.columns.size()) return "";
  return r->rec.columns[col].c_str();
}

double el_record_value(const el_record* r, size_t row, size_t col) {
  const Cell* c = cell_at(r, row, col);
  return c ? numeric(*c) : std::numeric_limits<double>::quiet_NaN();
}

const char* el_record_text(const el_record* r, size_t row, size_t col) {
  const Cell* c = cell_at(r, row, col);
  if (!c) return "";
  RunRecord one;
  one.columns = {"x"};
  one.rows = {{*c}};
  std::string csv = to_csv(one);
  r->scratch = csv.substr(2, csv.size() - 3);
  return r->scratch.c_str();
}

int el_record_summary(const el_record* r, const char* key, double* value) {
  if (!r || !key) return 0;
  const Cell* c = r->rec.summary_value(key);
  if (!c) return 0;
  if (value) *value = numeric(*c);
  return 1;
}

size_t el_record_warnings(const el_record* r) { return r ? r->rec.warnings.size() : 0; }

const char* el_record_warning_code(const el_record* r, size_t i) {
  return r && i < r->rec.warnings.size() ? r->rec.warnings[i].code.c_str() : "";
}

const char* el_record_warning_message(const el_record* r, size_t i) {
  return r && i < r->rec.warnings.size() ? r->rec.warnings[i].message.c_str() : "";
}

const char* el_record_describe(const el_record* r) {
  if (!r) return "";
  r->description = describe(r->rec);
  return r->description.c_str();
}

el_status el_record_csv(const el_record* r, char* buf, size_t len, size_t* needed) {
  if (!r) return fail(EL_ERR_ARGUMENT, "null record");
  return copy_out(to_csv(r->rec), buf, len, needed);
}

}  // extern "C"
