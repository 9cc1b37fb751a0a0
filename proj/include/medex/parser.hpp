#pragma once

#include <optional>
#include <string>
#include <vector>

#include "medex/types.hpp"
#include "medex/util.hpp"

namespace medex {

struct JsonExtraction {
  std::string text;
  bool repaired = false;  // true when no fenced block existed and a bare object was recovered
};

namespace detail {

/// Spans of <think>...</think> are reasoning preamble, never output.
inline std::string strip_think_spans(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  size_t pos = 0;
  while (pos < text.size()) {
    size_t open = text.find("<think>", pos);
    if (open == std::string::npos) {
      out += text.substr(pos);
      break;
    }
    out += text.substr(pos, open - pos);
    size_t close = text.find("</think>", open);
    if (close == std::string::npos) break;  // unterminated span: drop the rest
    pos = close + 8;
  }
  return out;
}

/// Last complete top-level {...} object, string- and escape-aware.
inline std::optional<std::string> last_balanced_object(const std::string& text) {
  std::optional<std::string> found;
  int depth = 0;
  size_t start = 0;
  bool in_string = false, escape = false;
  for (size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_string) {
      if (escape) escape = false;
      else if (c == '\\') escape = true;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"' && depth > 0) {
      in_string = true;
    } else if (c == '{') {
      if (depth == 0) start = i;
      ++depth;
    } else if (c == '}') {
      if (depth > 0 && --depth == 0) found = text.substr(start, i - start + 1);
    }
  }
  return found;
}

inline bool iequals_at(const std::string& text, size_t pos, std::string_view token) {
  if (pos + token.size() > text.size()) return false;
  for (size_t i = 0; i < token.size(); ++i)
    if (std::tolower(static_cast<unsigned char>(text[pos + i])) != token[i]) return false;
  return true;
}

}  // namespace detail

/// Pulls the model's answer out of a completion: strips <think> spans, then
/// takes the contents of the last ```json fenced block. Reasoning strategies
/// may echo an example's block earlier in the transcript, and the final
/// instructions place the answer last, so last block wins. Without any fence,
/// fall back to the last balanced top-level object (marked repaired).
inline JsonExtraction extract_json_block(const std::string& raw) {
  std::string text = detail::strip_think_spans(raw);

  std::optional<std::string> last_block;
  size_t pos = 0;
  while (true) {
    size_t open = text.find("```", pos);
    if (open == std::string::npos) break;
    size_t body = open + 3;
    if (!detail::iequals_at(text, body, "json")) {
      pos = body;
      continue;
    }
    body += 4;
    if (body < text.size() && text[body] == '\n') ++body;
    size_t close = text.find("```", body);
    if (close == std::string::npos) break;  // unterminated fence: leave to repair
    last_block = text.substr(body, close - body);
    pos = close + 3;
  }
  if (last_block) return {trim(*last_block), false};

  if (auto obj = detail::last_balanced_object(text)) return {*obj, true};
  throw NoJsonFound("no fenced ```json block or balanced object in model output");
}

/// Canonical text rendering of a field value, used for embeddings,
/// condition literals, and majority voting.
inline std::string value_to_text(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) {
      if (i) out += ", ";
      out += value_to_text(v[i]);
    }
    return out;
  }
  return v.dump();
}

namespace detail {

inline bool is_missing_string(const std::string& s, const std::string& missing_token) {
  std::string t = trim(s);
  return t == missing_token || t.empty();
}

inline std::optional<double> parse_number(const std::string& s) {
  std::string t = trim(s);
  if (t.empty()) return std::nullopt;
  try {
    size_t consumed = 0;
    double v = std::stod(t, &consumed);
    if (consumed != t.size()) return std::nullopt;
    if (!std::isfinite(v)) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

struct Coercion {
  Json value;
  bool coerced = false;
  bool defaulted = false;
};

inline Coercion coerce_option_value(const Json& v, const FieldSpec& field,
                                    const std::string& missing_token) {
  std::string s = v.is_string() ? v.get<std::string>() : value_to_text(v);
  bool nonstring = !v.is_string();
  std::vector<std::string> allowed = field.options;
  if (std::find(allowed.begin(), allowed.end(), missing_token) == allowed.end())
    allowed.push_back(missing_token);
  for (const auto& opt : allowed)
    if (s == opt) return {Json(opt), nonstring, false};
  // Case-insensitive, whitespace-trimmed match only; nothing fuzzier, or
  // scores would silently inflate.
  std::string norm = normalize_text(s);
  for (const auto& opt : allowed)
    if (norm == normalize_text(opt)) return {Json(opt), true, false};
  return {field.default_value, false, true};
}

inline Coercion coerce_value(const Json& v, const FieldSpec& field, const std::string& missing_token) {
  if (v.is_null()) return {field.default_value, false, true};
  switch (field.kind) {
    case FieldKind::categorical:
    case FieldKind::binary:
      return coerce_option_value(v, field, missing_token);
    case FieldKind::numeric: {
      if (v.is_number()) return {v, false, false};
      if (v.is_string()) {
        const auto& s = v.get<std::string>();
        if (is_missing_string(s, missing_token)) return {Json(missing_token), trim(s) != missing_token, false};
        if (auto num = parse_number(s)) return {Json(*num), true, false};
      }
      return {field.default_value, false, true};
    }
    case FieldKind::free_text: {
      if (v.is_string()) return {v, false, false};
      return {Json(value_to_text(v)), true, false};
    }
    case FieldKind::list: {
      if (v.is_array()) {
        Json out = Json::array();
        bool coerced = false;
        for (const auto& item : v) {
          if (item.is_string()) {
            out.push_back(item);
          } else {
            out.push_back(value_to_text(item));
            coerced = true;
          }
        }
        return {out, coerced, false};
      }
      if (v.is_string()) {
        const auto& s = v.get<std::string>();
        if (is_missing_string(s, missing_token)) return {Json::array(), true, false};
        return {Json::array({s}), true, false};  // scalar -> singleton list
      }
      return {Json::array({value_to_text(v)}), true, false};
    }
    case FieldKind::exact_string: {
      if (v.is_string()) return {v, false, false};
      return {Json(value_to_text(v)), true, false};
    }
  }
  return {field.default_value, false, true};
}

}  // namespace detail

/// Validates and coerces a raw JSON object against the field schemas.
/// Total for any JSON object: never throws past MalformedJson, and the
/// output covers every field exactly once.
inline ExtractionRecord parse_record(const std::string& raw, const std::vector<FieldSpec>& fields,
                                     const std::string& missing_token) {
  Json doc;
  try {
    doc = Json::parse(raw);
  } catch (const Json::exception& e) {
    throw MalformedJson(e.what());
  }
  if (!doc.is_object()) throw MalformedJson("top-level JSON value is not an object");

  ExtractionRecord rec;
  for (const auto& field : fields) {
    auto it = doc.find(field.name);
    if (it == doc.end()) {
      rec.values[field.name] = field.default_value;
      rec.flags.defaults_applied.push_back(field.name);
      continue;
    }
    auto c = detail::coerce_value(*it, field, missing_token);
    rec.values[field.name] = c.value;
    if (c.coerced) rec.flags.coercions.push_back(field.name);
    if (c.defaulted) rec.flags.defaults_applied.push_back(field.name);
  }
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    bool known = false;
    for (const auto& field : fields)
      if (field.name == it.key()) { known = true; break; }
    if (!known) rec.flags.unknown_keys.push_back(it.key());
  }
  return rec;
}

/// All-defaults record, used when a completion fails or nothing parses.
inline ExtractionRecord default_record(const std::vector<FieldSpec>& fields) {
  ExtractionRecord rec;
  rec.flags.parse_failed = true;
  for (const auto& field : fields) {
    rec.values[field.name] = field.default_value;
    rec.flags.defaults_applied.push_back(field.name);
  }
  return rec;
}

inline std::string render_fenced_json(const OrderedJson& values) {
  return "```json\n" + values.dump(2) + "\n```";
}

}  // namespace medex
