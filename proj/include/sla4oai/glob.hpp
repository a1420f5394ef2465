#pragma once

// Path patterns for limitation sections. The only wildcard is '*', and it
// matches any run of characters *including* '/'; "/v3/*" therefore covers
// "/v3/person" and "/v3/person/enrich", but not "/api/v3/person" (nothing
// matches across the literal prefix).
//
// Specificity, used to pick the winning pattern for a concrete operation:
//   1. number of fully literal path segments before the first wildcard,
//   2. total count of literal (non-'*') characters.
// A literal pattern therefore always beats a wildcard one, and a longer
// literal prefix beats a shorter one. Method concreteness is ranked above
// path specificity by the resolver (a 'get' entry beats an 'all' entry no
// matter the paths).

#include <string>
#include <string_view>

namespace sla4oai {

// Normalizes a documented path: ensures the leading '/', drops one trailing
// '/' (the root path "/" stays intact). Patterns and concrete paths go
// through the same normalization so comparisons are stable.
inline std::string normalize_path(std::string_view raw) {
  std::string p(raw);
  if (p.empty() || p.front() != '/') p.insert(p.begin(), '/');
  if (p.size() > 1 && p.back() == '/') p.pop_back();
  return p;
}

struct GlobPattern {
  std::string text;          // normalized pattern
  bool has_wildcard = false;
  int literal_prefix_segments = 0;  // complete segments before the first '*'
  int literal_chars = 0;            // all non-'*' characters

  static GlobPattern parse(std::string_view raw) {
    GlobPattern g;
    g.text = normalize_path(raw);
    size_t star = g.text.find('*');
    g.has_wildcard = star != std::string::npos;
    std::string_view prefix =
        g.has_wildcard ? std::string_view(g.text).substr(0, star) : g.text;
    // Count '/'-terminated segments in the literal prefix. For a literal
    // pattern every segment counts ("/a/b" -> 2); for "/v3/*" the prefix
    // "/v3/" holds one complete segment.
    int segments = 0;
    for (size_t i = 1; i < prefix.size(); ++i)
      if (prefix[i] == '/') ++segments;
    if (!g.has_wildcard && g.text.size() > 1) ++segments;  // last segment
    g.literal_prefix_segments = segments;
    for (char c : g.text)
      if (c != '*') ++g.literal_chars;
    return g;
  }

  bool matches(std::string_view path) const {
    return match_from(text, path);
  }

  // Strictly more specific than `other` under the documented ordering.
  bool more_specific_than(const GlobPattern& other) const {
    if (literal_prefix_segments != other.literal_prefix_segments)
      return literal_prefix_segments > other.literal_prefix_segments;
    return literal_chars > other.literal_chars;
  }

  bool same_specificity(const GlobPattern& other) const {
    return literal_prefix_segments == other.literal_prefix_segments &&
           literal_chars == other.literal_chars;
  }

  friend bool operator==(const GlobPattern&, const GlobPattern&) = default;

 private:
  // Iterative wildcard match; '*' spans any characters, '/' included.
  static bool match_from(std::string_view pat, std::string_view str) {
    size_t p = 0, s = 0;
    size_t star = std::string_view::npos, mark = 0;
    while (s < str.size()) {
      if (p < pat.size() && pat[p] == '*') {
        star = p++;
        mark = s;
      } else if (p < pat.size() && pat[p] == str[s]) {
        ++p;
        ++s;
      } else if (star != std::string_view::npos) {
        p = star + 1;
        s = ++mark;
      } else {
        return false;
      }
    }
    while (p < pat.size() && pat[p] == '*') ++p;
    return p == pat.size();
  }
};

}  // namespace sla4oai
