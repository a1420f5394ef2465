#pragma once

// Located diagnostics for document-level problems. Programming-contract
// violations (bad arguments to analysis entry points) throw instead; a
// Diagnostic always points at something the document author can fix.

#include <algorithm>
#include <string>
#include <vector>

namespace sla4oai {

enum class Severity { error, warning };

inline std::string to_string(Severity s) {
  return s == Severity::error ? "error" : "warning";
}

struct Diagnostic {
  Severity severity = Severity::error;
  std::string code;      // stable machine-readable identifier, e.g. EMPTY_INPUT
  std::string location;  // JSON-pointer-ish path into the document
  std::string message;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

inline bool has_errors(const std::vector<Diagnostic>& diags) {
  return std::any_of(diags.begin(), diags.end(), [](const Diagnostic& d) {
    return d.severity == Severity::error;
  });
}

// JSON-pointer escaping: '~' -> "~0", '/' -> "~1".
inline std::string pointer_escape(std::string_view token) {
  std::string out;
  out.reserve(token.size());
  for (char c : token) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

inline std::string pointer(std::initializer_list<std::string_view> tokens) {
  std::string out;
  for (auto t : tokens) {
    out += '/';
    out += pointer_escape(t);
  }
  return out.empty() ? "/" : out;
}

}  // namespace sla4oai
