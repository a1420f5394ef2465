#pragma once

// Command-line front end. Kept as a library function (run_cli) so the exit
// code and rendering logic are testable without spawning a process.
//
// Exit codes:
//   0  document analyzed, no conflicts
//   1  document analyzed, conflicts found
//   2  the document is syntactically or semantically broken
//   3  I/O trouble: unreadable input, refused/failed fetch, unresolvable
//      OpenAPI reference, or unusable command line

#include "sla4oai/analysis.hpp"
#include "sla4oai/io.hpp"
#include "sla4oai/service.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

namespace sla4oai {

struct CliOptions {
  std::string operation;  // "syntax" or "validity"
  std::string file;       // path or (with --allow-fetch) http URL
  std::string capacity_path;
  std::string oas_path;
  std::string format = "text";  // "text" or "json"
  std::string serve_address;    // HOST:PORT; empty means one-shot mode
  bool allow_fetch = false;
};

namespace detail {

inline std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::string dirname_of(const std::string& path) {
  size_t slash = path.find_last_of('/');
  if (slash == std::string::npos) return ".";
  return slash == 0 ? "/" : path.substr(0, slash);
}

// Codes that signal the run failed before/around the document itself rather
// than inside it; they map to exit 3.
inline bool is_io_code(const std::string& code) {
  return code == "UNREADABLE_INPUT" || code == "FETCH_DENIED" ||
         code == "FETCH_FAILED" || code == "OAS_UNAVAILABLE" ||
         code == "SLA_UNAVAILABLE";
}

inline void render_diagnostics(const std::vector<Diagnostic>& diags,
                               std::ostream& out) {
  for (const Diagnostic& d : diags)
    out << to_string(d.severity) << "[" << d.code << "] " << d.location
        << ": " << d.message << "\n";
}

inline void render_report(const ConflictReport& report, std::ostream& out) {
  for (const Conflict& c : report.conflicts) {
    out << "conflict " << to_string(c.criterion) << ": "
        << c.explanation.value("summary", std::string{}) << "\n";
    for (const std::string& s : c.subjects) out << "  at " << s << "\n";
  }
  for (const Exclusion& e : report.exclusions)
    out << "excluded " << e.location << ": " << e.reason << "\n";
  for (const CapacityUse& u : report.capacities)
    out << "capacity " << u.plan << " " << to_string(u.operation) << " "
        << u.metric << ": " << decimal_string(u.capacity.threshold) << " / "
        << to_string(u.capacity.period) << " ("
        << to_string(u.capacity.provenance) << ")\n";
  out << "verdict: " << (report.valid() ? "valid" : "invalid") << " ("
      << report.conflicts.size() << " conflicts, " << report.exclusions.size()
      << " exclusions)\n";
}

}  // namespace detail

// The exit code is decided by the data alone — rendering format never
// changes it.
inline int exit_code_for(const AnalysisOutcome& outcome) {
  for (const Diagnostic& d : outcome.diagnostics)
    if (d.severity == Severity::error && detail::is_io_code(d.code)) return 3;
  if (has_errors(outcome.diagnostics)) return 2;
  if (outcome.report && !outcome.report->valid()) return 1;
  return 0;
}

inline int run_cli(const CliOptions& options, std::ostream& out,
                   std::ostream& err) {
  bool allow_fetch = options.allow_fetch;
  if (!allow_fetch) {
    const char* env = std::getenv("SLA_ANALYZER_ALLOW_FETCH");
    allow_fetch = env && std::string(env) == "1";
  }

  if (!options.serve_address.empty())
    return serve(options.serve_address, {allow_fetch}, err);

  if (options.operation != "syntax" && options.operation != "validity") {
    err << "error: unknown operation '" << options.operation
        << "' (expected syntax or validity)\n";
    return 3;
  }
  if (options.format != "text" && options.format != "json") {
    err << "error: unknown format '" << options.format
        << "' (expected text or json)\n";
    return 3;
  }
  if (options.file.empty()) {
    err << "error: no input document (use -f FILE)\n";
    return 3;
  }

  // Load the document: local file, or URL when fetching is allowed.
  std::string base_dir = ".";
  std::optional<std::string> text;
  if (is_url(options.file)) {
    if (!allow_fetch) {
      err << "error[FETCH_DENIED] " << options.file
          << ": fetching is disabled; pass --allow-fetch or set "
             "SLA_ANALYZER_ALLOW_FETCH=1\n";
      return 3;
    }
    text = fetching_loader()(options.file);
    if (!text) {
      err << "error[FETCH_FAILED] " << options.file << ": cannot fetch document\n";
      return 3;
    }
  } else {
    text = detail::read_file(options.file);
    if (!text) {
      err << "error[UNREADABLE_INPUT] " << options.file << ": cannot read file\n";
      return 3;
    }
    base_dir = detail::dirname_of(options.file);
  }

  if (options.operation == "syntax") {
    SyntaxResult result = syntax_check(*text);
    if (options.format == "json") {
      Json j;
      j["diagnostics"] = diagnostics_to_json(result.diagnostics);
      j["valid"] = result.valid;
      out << j.dump(2) << "\n";
    } else {
      detail::render_diagnostics(result.diagnostics, out);
      out << "syntax: " << (result.valid ? "valid" : "invalid") << "\n";
    }
    return result.valid ? 0 : 2;
  }

  MaterializeOptions mat;
  mat.loader = allow_fetch ? fetching_loader(base_dir) : offline_loader(base_dir);
  if (!options.oas_path.empty()) {
    auto oas = detail::read_file(options.oas_path);
    if (!oas) {
      err << "error[UNREADABLE_INPUT] " << options.oas_path
          << ": cannot read OpenAPI file\n";
      return 3;
    }
    mat.oas_text = *oas;
  }
  std::optional<std::string> capacity;
  if (!options.capacity_path.empty()) {
    capacity = detail::read_file(options.capacity_path);
    if (!capacity) {
      err << "error[UNREADABLE_INPUT] " << options.capacity_path
          << ": cannot read capacity file\n";
      return 3;
    }
  }

  AnalysisOutcome outcome = run_validity(*text, mat, capacity);
  if (options.format == "json") {
    out << outcome_to_json(outcome).dump(2) << "\n";
  } else {
    detail::render_diagnostics(outcome.diagnostics, out);
    if (outcome.report) detail::render_report(*outcome.report, out);
  }
  return exit_code_for(outcome);
}

// CLI11 wiring, shared by the real main and the argument-parsing tests.
inline void attach_cli(CLI::App& app, CliOptions& options) {
  app.add_option("-o,--operation", options.operation,
                 "analysis to run: syntax or validity");
  app.add_option("-f,--file", options.file, "SLA document (YAML or JSON)");
  app.add_option("--capacity", options.capacity_path,
                 "capacity sidecar YAML file");
  app.add_option("--oas", options.oas_path,
                 "OpenAPI document overriding context.api");
  app.add_option("--format", options.format, "output format: text or json")
      ->default_val("text");
  app.add_option("--serve", options.serve_address,
                 "run the HTTP service on HOST:PORT instead");
  app.add_flag("--allow-fetch", options.allow_fetch,
               "allow fetching documents over http (also: "
               "SLA_ANALYZER_ALLOW_FETCH=1)");
}

inline int run_main(int argc, const char* const* argv, std::ostream& out,
                    std::ostream& err) {
  CliOptions options;
  CLI::App app{"SLA pricing document analyzer"};
  attach_cli(app, options);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
  return run_cli(options, out, err);
}

}  // namespace sla4oai
