#include <escapelab/escapelab.h>

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

std::vector<std::string> commands() {
  std::vector<std::string> out;
  std::istringstream in(el_commands());
  for (std::string c; in >> c;) out.push_back(c);
  out.push_back("report");
  return out;
}

void usage(std::ostream& os) {
  os << "usage: escapelab <subcommand> [--config PATH] [--seed U64] [--out DIR] [--threads N]"
        " [--format csv|json|both]\n"
        "       escapelab report --run RUN_ID|PATH [--out DIR]\n\nsubcommands:\n";
  for (const auto& c : commands()) os << "  " << c << "\n";
  os << "\nESCAPELAB_THREADS sets the thread count when --threads is absent.\n";
}

int report_failure(el_status s) {
  std::cerr << "error: " << el_status_name(s) << ": " << el_last_error() << "\n";
  if (s == EL_ERR_RESOLUTION) std::cerr << "required points per dimension: " << el_last_required_points() << "\n";
  return el_exit_code(s);
}

int run_report(const std::string& run, const std::string& out_dir) {
  el_record* rec = nullptr;
  bool is_path = run.find('/') != std::string::npos || (run.size() > 5 && run.substr(run.size() - 5) == ".json");
  el_status s = is_path ? el_record_load(run.c_str(), &rec) : el_record_load_run(out_dir.c_str(), run.c_str(), &rec);
  if (s != EL_OK) return report_failure(s);
  std::cout << el_record_describe(rec);
  el_record_free(rec);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    usage(std::cerr);
    return 64;
  }
  std::string command = argv[1];
  if (command == "-h" || command == "--help") {
    usage(std::cout);
    return 0;
  }
  bool known = false;
  for (const auto& c : commands()) known = known || c == command;
  if (!known) {
    std::cerr << "escapelab: unknown subcommand '" << command << "'\n";
    usage(std::cerr);
    return 64;
  }

  CLI::App app{"escapelab " + command};
  app.name("escapelab " + command);
  std::string config_path, out_dir, format, run;
  std::optional<std::uint64_t> seed;
  int threads = 0;
  if (command == "report") {
    app.add_option("--run", run, "run id (looked up in --out) or path to a JSON record")->required();
    app.add_option("--out", out_dir, "directory holding run records");
  } else {
    app.add_option("--config", config_path, "experiment configuration file");
    app.add_option("--seed", seed, "64-bit seed; overrides dynamics.seed");
    app.add_option("--out", out_dir, "output directory; overrides output.directory");
    app.add_option("--threads", threads, "worker threads")->check(CLI::NonNegativeNumber);
    app.add_option("--format", format, "csv, json or both; overrides output.format")
        ->check(CLI::IsMember({"csv", "json", "both"}));
  }
  try {
    app.parse(argc - 1, argv + 1);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (command == "report") return run_report(run, out_dir.empty() ? "runs" : out_dir);

  el_config* cfg = nullptr;
  el_status s = config_path.empty() ? el_config_default(&cfg) : el_config_load(config_path.c_str(), &cfg);
  if (s != EL_OK) return report_failure(s);
  if (!out_dir.empty()) s = el_config_set(cfg, "output.directory", out_dir.c_str());
  if (s == EL_OK && !format.empty()) s = el_config_set(cfg, "output.format", format.c_str());
  if (s != EL_OK) {
    el_config_free(cfg);
    return report_failure(s);
  }

  el_run_options opts{seed.has_value() ? 1 : 0, seed.value_or(0), threads};
  el_record* rec = nullptr;
  s = el_run(command.c_str(), cfg, &opts, &rec);
  if (s == EL_OK) {
    const char* dir = nullptr;
    el_config_get(cfg, "output.directory", &dir);
    std::string dir_s = dir;
    s = el_record_write(rec, dir_s.c_str(), EL_FORMAT_CONFIG);
    if (s == EL_OK) {
      std::cout << el_record_describe(rec);
      const char* fmt = nullptr;
      el_config_get(cfg, "output.format", &fmt);
      std::string f = fmt;
      if (f != "csv") std::cout << "  wrote " << dir_s << "/" << el_record_run_id(rec) << ".json\n";
      if (f != "json") std::cout << "  wrote " << dir_s << "/" << el_record_run_id(rec) << ".csv\n";
    }
  }
  int code = s == EL_OK ? 0 : report_failure(s);
  el_record_free(rec);
  el_config_free(cfg);
  return code;
}
