#pragma once

// A tiny ordered document tree with YAML and JSON emitters. yaml-cpp is fine
// for reading, but its emitter makes no byte-stability promises across
// versions; serialization here must be canonical (same model in => same bytes
// out), so we emit ourselves. Numbers are carried as already-rendered text to
// keep exact decimal forms intact.

#include <cassert>
#include <cstdio>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sla4oai {

struct DocValue {
  enum class Kind { null, boolean, number, string, sequence, mapping };
  Kind kind = Kind::null;
  bool flag = false;
  std::string scalar;  // number: verbatim text, string: raw value
  std::vector<DocValue> items;
  std::vector<std::pair<std::string, DocValue>> fields;

  static DocValue boolean(bool b) {
    DocValue v;
    v.kind = Kind::boolean;
    v.flag = b;
    return v;
  }
  static DocValue number(std::string text) {
    DocValue v;
    v.kind = Kind::number;
    v.scalar = std::move(text);
    return v;
  }
  static DocValue string(std::string text) {
    DocValue v;
    v.kind = Kind::string;
    v.scalar = std::move(text);
    return v;
  }
  static DocValue sequence() {
    DocValue v;
    v.kind = Kind::sequence;
    return v;
  }
  static DocValue mapping() {
    DocValue v;
    v.kind = Kind::mapping;
    return v;
  }

  DocValue& add(std::string key, DocValue value) {
    assert(kind == Kind::mapping);
    fields.emplace_back(std::move(key), std::move(value));
    return fields.back().second;
  }
  DocValue& push(DocValue value) {
    assert(kind == Kind::sequence);
    items.push_back(std::move(value));
    return items.back();
  }
};

namespace detail {

inline bool yaml_plain_safe(const std::string& s) {
  if (s.empty() || s.front() == ' ' || s.back() == ' ') return false;
  if (s == "true" || s == "false" || s == "null" || s == "~") return false;
  static constexpr std::string_view first_unsafe = "!&*?|>%@`\"'#-[]{},:";
  if (first_unsafe.find(s.front()) != std::string_view::npos) return false;
  bool numberish = true;
  for (size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
              (c >= '0' && c <= '9') || c == '_' || c == '.' || c == '/' ||
              c == '-' || c == ' ';
    if (!ok) return false;
    if (!((c >= '0' && c <= '9') || c == '.' || c == '-')) numberish = false;
    if (c == ':' || c == '#') return false;  // defensive; ':' not in ok-set
  }
  return !numberish;
}

inline std::string yaml_scalar(const DocValue& v) {
  switch (v.kind) {
    case DocValue::Kind::null:    return "~";
    case DocValue::Kind::boolean: return v.flag ? "true" : "false";
    case DocValue::Kind::number:  return v.scalar;
    case DocValue::Kind::string: {
      if (yaml_plain_safe(v.scalar)) return v.scalar;
      std::string out = "'";
      for (char c : v.scalar) {
        out += c;
        if (c == '\'') out += '\'';
      }
      out += '\'';
      return out;
    }
    default: return "";
  }
}

inline bool is_scalar(const DocValue& v) {
  return v.kind != DocValue::Kind::sequence && v.kind != DocValue::Kind::mapping;
}

inline void emit_yaml_block(const DocValue& v, std::string& out, int indent);

inline void emit_yaml_entry(const std::string& key, const DocValue& v,
                            std::string& out, int indent) {
  out.append(static_cast<size_t>(indent), ' ');
  DocValue k = DocValue::string(key);
  out += yaml_scalar(k);
  out += ':';
  if (is_scalar(v)) {
    out += ' ';
    out += yaml_scalar(v);
    out += '\n';
  } else if ((v.kind == DocValue::Kind::mapping && v.fields.empty()) ||
             (v.kind == DocValue::Kind::sequence && v.items.empty())) {
    out += v.kind == DocValue::Kind::mapping ? " {}\n" : " []\n";
  } else {
    out += '\n';
    emit_yaml_block(v, out, indent + 2);
  }
}

inline void emit_yaml_block(const DocValue& v, std::string& out, int indent) {
  if (v.kind == DocValue::Kind::mapping) {
    for (const auto& [key, val] : v.fields) emit_yaml_entry(key, val, out, indent);
    return;
  }
  if (v.kind == DocValue::Kind::sequence) {
    for (const DocValue& item : v.items) {
      out.append(static_cast<size_t>(indent), ' ');
      out += "- ";
      if (is_scalar(item)) {
        out += yaml_scalar(item);
        out += '\n';
      } else if (item.kind == DocValue::Kind::mapping && !item.fields.empty()) {
        // First field shares the "- " line, the rest align under it.
        bool first = true;
        for (const auto& [key, val] : item.fields) {
          if (first) {
            std::string inner;
            emit_yaml_entry(key, val, inner, indent + 2);
            out += inner.substr(static_cast<size_t>(indent) + 2);
            first = false;
          } else {
            emit_yaml_entry(key, val, out, indent + 2);
          }
        }
      } else if (item.kind == DocValue::Kind::mapping) {
        out += "{}\n";
      } else if (item.items.empty()) {
        out += "[]\n";
      } else {
        out += '\n';
        emit_yaml_block(item, out, indent + 2);
      }
    }
    return;
  }
  out.append(static_cast<size_t>(indent), ' ');
  out += yaml_scalar(v);
  out += '\n';
}

inline void json_escape_into(const std::string& s, std::string& out) {
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
}

inline void emit_json_value(const DocValue& v, std::string& out, int indent) {
  std::string pad(static_cast<size_t>(indent), ' ');
  std::string pad2(static_cast<size_t>(indent) + 2, ' ');
  switch (v.kind) {
    case DocValue::Kind::null:    out += "null"; return;
    case DocValue::Kind::boolean: out += v.flag ? "true" : "false"; return;
    case DocValue::Kind::number:  out += v.scalar; return;
    case DocValue::Kind::string:  json_escape_into(v.scalar, out); return;
    case DocValue::Kind::sequence: {
      if (v.items.empty()) { out += "[]"; return; }
      out += "[\n";
      for (size_t i = 0; i < v.items.size(); ++i) {
        out += pad2;
        emit_json_value(v.items[i], out, indent + 2);
        if (i + 1 < v.items.size()) out += ',';
        out += '\n';
      }
      out += pad + "]";
      return;
    }
    case DocValue::Kind::mapping: {
      if (v.fields.empty()) { out += "{}"; return; }
      out += "{\n";
      for (size_t i = 0; i < v.fields.size(); ++i) {
        out += pad2;
        json_escape_into(v.fields[i].first, out);
        out += ": ";
        emit_json_value(v.fields[i].second, out, indent + 2);
        if (i + 1 < v.fields.size()) out += ',';
        out += '\n';
      }
      out += pad + "}";
      return;
    }
  }
}

}  // namespace detail

inline std::string emit_yaml(const DocValue& root) {
  std::string out;
  detail::emit_yaml_block(root, out, 0);
  return out;
}

inline std::string emit_json(const DocValue& root) {
  std::string out;
  detail::emit_json_value(root, out, 0);
  out += '\n';
  return out;
}

}  // namespace sla4oai
