#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "medex/errors.hpp"

namespace medex {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Field schema

enum class FieldKind { categorical, binary, numeric, free_text, list, exact_string };
enum class MetricKind { balanced_accuracy, accuracy, cosine_similarity, symmetric_similarity, exact_match };

inline const char* to_string(FieldKind k) {
  switch (k) {
    case FieldKind::categorical: return "categorical";
    case FieldKind::binary: return "binary";
    case FieldKind::numeric: return "numeric";
    case FieldKind::free_text: return "free_text";
    case FieldKind::list: return "list";
    case FieldKind::exact_string: return "exact_string";
  }
  return "?";
}

inline FieldKind field_kind_from_string(const std::string& s, const std::string& key_path) {
  if (s == "categorical") return FieldKind::categorical;
  if (s == "binary") return FieldKind::binary;
  if (s == "numeric") return FieldKind::numeric;
  if (s == "free_text") return FieldKind::free_text;
  if (s == "list") return FieldKind::list;
  if (s == "exact_string") return FieldKind::exact_string;
  throw SchemaError(key_path + ": unknown field kind '" + s + "'");
}

inline const char* to_string(MetricKind m) {
  switch (m) {
    case MetricKind::balanced_accuracy: return "balanced_accuracy";
    case MetricKind::accuracy: return "accuracy";
    case MetricKind::cosine_similarity: return "cosine_similarity";
    case MetricKind::symmetric_similarity: return "symmetric_similarity";
    case MetricKind::exact_match: return "exact_match";
  }
  return "?";
}

inline MetricKind metric_kind_from_string(const std::string& s, const std::string& key_path) {
  if (s == "balanced_accuracy") return MetricKind::balanced_accuracy;
  if (s == "accuracy") return MetricKind::accuracy;
  if (s == "cosine_similarity") return MetricKind::cosine_similarity;
  if (s == "symmetric_similarity") return MetricKind::symmetric_similarity;
  if (s == "exact_match") return MetricKind::exact_match;
  throw SchemaError(key_path + ": unknown metric '" + s + "'");
}

/// Metric implied by the field kind. Configs may state the metric
/// explicitly but it must agree with this mapping.
inline MetricKind metric_for_kind(FieldKind k) {
  switch (k) {
    case FieldKind::categorical:
    case FieldKind::binary: return MetricKind::balanced_accuracy;
    case FieldKind::numeric: return MetricKind::accuracy;
    case FieldKind::free_text: return MetricKind::cosine_similarity;
    case FieldKind::list: return MetricKind::symmetric_similarity;
    case FieldKind::exact_string: return MetricKind::exact_match;
  }
  return MetricKind::accuracy;
}

struct FieldSpec {
  std::string name;
  FieldKind kind = FieldKind::free_text;
  std::vector<std::string> options;  // categorical/binary only
  Json default_value;                // used when the model omits the field
  MetricKind metric = MetricKind::cosine_similarity;
  std::string description;
};

// ---------------------------------------------------------------------------
// Prompt-graph schema

enum class CondOp { equals, not_equals, in_set };

inline const char* to_string(CondOp op) {
  switch (op) {
    case CondOp::equals: return "equals";
    case CondOp::not_equals: return "not_equals";
    case CondOp::in_set: return "in";
  }
  return "?";
}

struct Condition {
  std::string field;
  CondOp op = CondOp::equals;
  std::vector<std::string> values;  // one literal for equals/not_equals
};

struct GraphNode {
  std::string id;
  std::vector<std::string> fields;
  std::string instruction;  // node-local instruction text, may be empty
  std::optional<Condition> condition;
};

struct GraphSpec {
  std::vector<GraphNode> nodes;
  std::vector<std::pair<std::string, std::string>> edges;  // from -> to
};

// ---------------------------------------------------------------------------
// Task schema

struct ExampleSpec {
  std::string report_id;
  std::string report;
  // Per-field justification lines, rendered as a bullet list for the
  // reasoning strategies. Order follows the task's declared field order.
  std::vector<std::pair<std::string, std::string>> reasoning;
  OrderedJson expected = OrderedJson::object();
};

struct PromptSections {
  std::string system_plain;
  std::string system_reasoning;
  std::string task_intro;      // leads into the JSON skeleton
  std::string example_intro;   // "{n}" placeholder for the example count
  std::string report_header;   // "{id}" placeholder for the report id
  std::string final_plain;
  std::string final_reasoning;
};

struct TaskSpec {
  int schema_version = 1;
  std::string id;
  std::string language;
  std::string missing_token;
  std::vector<FieldSpec> fields;
  PromptSections prompt;
  std::vector<ExampleSpec> examples;
  std::optional<GraphSpec> graph;

  const FieldSpec* find_field(const std::string& name) const {
    for (const auto& f : fields)
      if (f.name == name) return &f;
    return nullptr;
  }
};

// ---------------------------------------------------------------------------
// Model registry

struct ModelSpec {
  std::string id;
  std::string endpoint;
  double temperature = 0.6;
  double top_p = 0.95;
  int top_k = 50;
  std::string size_class;  // large | medium | small | tiny | medical
  int gpu_count = 1;
  double param_count_b = 0.0;  // billions, for throughput reporting
  double timeout_s = 30.0;
  int max_retries = 3;
  int max_inflight = 4;
};

// ---------------------------------------------------------------------------
// Strategies

enum class StrategyKind { zero_shot, one_shot, few_shot, chain_of_thought, self_consistency, prompt_graph };

inline const char* to_string(StrategyKind k) {
  switch (k) {
    case StrategyKind::zero_shot: return "zero_shot";
    case StrategyKind::one_shot: return "one_shot";
    case StrategyKind::few_shot: return "few_shot";
    case StrategyKind::chain_of_thought: return "chain_of_thought";
    case StrategyKind::self_consistency: return "self_consistency";
    case StrategyKind::prompt_graph: return "prompt_graph";
  }
  return "?";
}

inline StrategyKind strategy_from_string(const std::string& s) {
  if (s == "zero_shot") return StrategyKind::zero_shot;
  if (s == "one_shot") return StrategyKind::one_shot;
  if (s == "few_shot") return StrategyKind::few_shot;
  if (s == "chain_of_thought") return StrategyKind::chain_of_thought;
  if (s == "self_consistency") return StrategyKind::self_consistency;
  if (s == "prompt_graph") return StrategyKind::prompt_graph;
  throw SchemaError("unknown strategy '" + s + "'");
}

/// Chain-of-thought and self-consistency extend the few-shot setting and
/// carry three examples; prompt_graph decomposes the task per node and
/// injects none.
inline int examples_for_strategy(StrategyKind k) {
  switch (k) {
    case StrategyKind::zero_shot: return 0;
    case StrategyKind::one_shot: return 1;
    case StrategyKind::few_shot:
    case StrategyKind::chain_of_thought:
    case StrategyKind::self_consistency: return 3;
    case StrategyKind::prompt_graph: return 0;
  }
  return 0;
}

inline bool is_reasoning_strategy(StrategyKind k) {
  return k == StrategyKind::chain_of_thought || k == StrategyKind::self_consistency ||
         k == StrategyKind::prompt_graph;
}

struct StrategySpec {
  StrategyKind kind = StrategyKind::zero_shot;
  int n_examples = 0;
  int k_samples = 3;             // self-consistency only; >= 3 and odd
  double temperature_delta = 0.1;

  static StrategySpec make(StrategyKind kind, int k_samples = 3, double delta = 0.1) {
    StrategySpec s;
    s.kind = kind;
    s.n_examples = examples_for_strategy(kind);
    if (k_samples < 3 || k_samples % 2 == 0)
      throw SchemaError("strategy.k_samples: must be odd and >= 3");
    s.k_samples = k_samples;
    s.temperature_delta = delta;
    return s;
  }
};

// ---------------------------------------------------------------------------
// Messages

enum class Role { system, human, assistant };

inline const char* to_string(Role r) {
  switch (r) {
    case Role::system: return "system";
    case Role::human: return "human";
    case Role::assistant: return "assistant";
  }
  return "?";
}

/// Wire name used by OpenAI-compatible endpoints.
inline const char* wire_role(Role r) {
  switch (r) {
    case Role::system: return "system";
    case Role::human: return "user";
    case Role::assistant: return "assistant";
  }
  return "?";
}

struct Message {
  Role role = Role::human;
  std::string content;
};

// ---------------------------------------------------------------------------
// Extraction results

struct RecordFlags {
  bool parse_failed = false;
  std::vector<std::string> defaults_applied;
  std::vector<std::string> coercions;
  std::vector<std::string> unknown_keys;
};

struct ExtractionRecord {
  std::string report_id;
  std::string model_id;
  std::string strategy;
  OrderedJson values = OrderedJson::object();  // one entry per task field, declared order
  RecordFlags flags;
};

}  // namespace medex
