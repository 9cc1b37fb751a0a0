#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "medex/embedding.hpp"
#include "medex/parser.hpp"
#include "medex/types.hpp"
#include "medex/util.hpp"

namespace medex {

struct LabeledPair {
  Json ref;   // reference standard y_v
  Json pred;  // predicted value
  std::string report_id;
};

struct CI {
  double lo = 0.0;
  double hi = 0.0;
};

struct VariableScore {
  std::string variable;
  MetricKind metric = MetricKind::accuracy;
  double value = 0.0;
  CI ci;
  int n = 0;
};

// ---------------------------------------------------------------------------
// Per-variable metrics

/// Mean per-category recall. Categories never seen in the reference are
/// excluded from the mean, so unused options cannot zero-divide.
inline double balanced_accuracy(const std::vector<LabeledPair>& pairs,
                                const std::vector<std::string>& categories) {
  if (pairs.empty()) throw EmptyInput("balanced_accuracy: no pairs");
  std::map<std::string, std::pair<long, long>> tally;  // category -> {TP, FN}
  for (const auto& c : categories) tally[c];
  for (const auto& p : pairs) {
    std::string ref = value_to_text(p.ref);
    std::string pred = value_to_text(p.pred);
    auto it = tally.find(ref);
    if (it == tally.end())
      throw SchemaError("balanced_accuracy: reference value '" + ref + "' not in category set");
    if (ref == pred) it->second.first++;
    else it->second.second++;
  }
  double sum = 0.0;
  int present = 0;
  for (const auto& [cat, counts] : tally) {
    long support = counts.first + counts.second;
    if (support == 0) continue;
    sum += static_cast<double>(counts.first) / static_cast<double>(support);
    ++present;
  }
  if (present == 0) throw EmptyInput("balanced_accuracy: no category present in reference");
  return sum / present;
}

namespace detail {

inline std::optional<double> numeric_view(const Json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return parse_number(v.get<std::string>());
  return std::nullopt;
}

inline bool values_match(const Json& a, const Json& b, bool numeric_normalization) {
  if (numeric_normalization) {
    auto na = numeric_view(a);
    auto nb = numeric_view(b);
    if (na && nb) return *na == *nb;
    if (na.has_value() != nb.has_value()) return false;
  }
  return trim(value_to_text(a)) == trim(value_to_text(b));
}

}  // namespace detail

/// Fraction of exact matches. Numeric fields compare after number parsing
/// ("10" equals 10); exact_string fields compare trimmed strings byte-wise.
inline double exact_accuracy(const std::vector<LabeledPair>& pairs, bool numeric_normalization = true) {
  if (pairs.empty()) throw EmptyInput("exact_accuracy: no pairs");
  long hits = 0;
  for (const auto& p : pairs)
    if (detail::values_match(p.ref, p.pred, numeric_normalization)) ++hits;
  return static_cast<double>(hits) / static_cast<double>(pairs.size());
}

/// Mean cosine similarity between sentence embeddings. Embeddings of empty
/// text are undefined, hence the declared conventions: both sides empty
/// scores 1.0, exactly one empty scores 0.0.
inline double text_similarity(const std::vector<LabeledPair>& pairs, Embedder& embedder) {
  if (pairs.empty()) throw EmptyInput("text_similarity: no pairs");
  double sum = 0.0;
  for (const auto& p : pairs) {
    std::string a = trim(value_to_text(p.ref));
    std::string b = trim(value_to_text(p.pred));
    if (a.empty() && b.empty()) { sum += 1.0; continue; }
    if (a.empty() || b.empty()) continue;  // contributes 0
    sum += embedder.similarity(a, b);
  }
  return sum / static_cast<double>(pairs.size());
}

namespace detail {

inline std::vector<std::string> list_items(const Json& v) {
  std::vector<std::string> items;
  if (v.is_array()) {
    for (const auto& item : v) {
      std::string s = trim(value_to_text(item));
      if (!s.empty()) items.push_back(s);
    }
  } else {
    std::string s = trim(value_to_text(v));
    if (!s.empty()) items.push_back(s);
  }
  return items;
}

}  // namespace detail

/// Per-sample symmetric similarity between item lists: the average of the
/// mean best-match similarity from reference to predicted items and the
/// reverse direction, balancing coverage against hallucinated items.
inline double list_pair_similarity(const std::vector<std::string>& ground_truth,
                                   const std::vector<std::string>& predicted, Embedder& embedder) {
  if (ground_truth.empty() && predicted.empty()) return 1.0;
  if (ground_truth.empty() || predicted.empty()) return 0.0;
  std::vector<std::string> all = ground_truth;
  all.insert(all.end(), predicted.begin(), predicted.end());
  auto vecs = embedder.embed(all);
  auto g_vec = [&](size_t i) -> const Vector& { return vecs[i]; };
  auto p_vec = [&](size_t i) -> const Vector& { return vecs[ground_truth.size() + i]; };

  double forward = 0.0;
  for (size_t g = 0; g < ground_truth.size(); ++g) {
    double best = -1.0;
    for (size_t p = 0; p < predicted.size(); ++p) best = std::max(best, cosine(g_vec(g), p_vec(p)));
    forward += best;
  }
  forward /= static_cast<double>(ground_truth.size());

  double backward = 0.0;
  for (size_t p = 0; p < predicted.size(); ++p) {
    double best = -1.0;
    for (size_t g = 0; g < ground_truth.size(); ++g) best = std::max(best, cosine(p_vec(p), g_vec(g)));
    backward += best;
  }
  backward /= static_cast<double>(predicted.size());

  return 0.5 * (forward + backward);
}

/// Dataset-level symmetric list similarity: mean of per-sample scores.
inline double list_symmetric_similarity(const std::vector<LabeledPair>& pairs, Embedder& embedder) {
  if (pairs.empty()) throw EmptyInput("list_symmetric_similarity: no pairs");
  double sum = 0.0;
  for (const auto& p : pairs)
    sum += list_pair_similarity(detail::list_items(p.ref), detail::list_items(p.pred), embedder);
  return sum / static_cast<double>(pairs.size());
}

/// Unweighted mean of per-variable scores, so every variable contributes
/// equally regardless of sample count.
inline double macro_average(const std::vector<VariableScore>& scores) {
  if (scores.empty()) throw EmptyInput("macro_average: no scores");
  double sum = 0.0;
  for (const auto& s : scores) sum += s.value;
  return sum / static_cast<double>(scores.size());
}

inline double macro_average_values(const std::vector<double>& values) {
  if (values.empty()) throw EmptyInput("macro_average: no scores");
  return mean_of(values);
}

// ---------------------------------------------------------------------------
// Metric dispatch per field schema

/// Values equal to the task's missing token act as empty text for the
/// embedding metrics; the other metrics treat the token as a normal value.
inline double variable_metric(const FieldSpec& field, std::vector<LabeledPair> pairs,
                              Embedder& embedder, const std::string& missing_token) {
  switch (field.metric) {
    case MetricKind::balanced_accuracy: {
      std::vector<std::string> categories = field.options;
      if (std::find(categories.begin(), categories.end(), missing_token) == categories.end())
        categories.push_back(missing_token);
      return balanced_accuracy(pairs, categories);
    }
    case MetricKind::accuracy:
      return exact_accuracy(pairs, /*numeric_normalization=*/true);
    case MetricKind::exact_match:
      return exact_accuracy(pairs, /*numeric_normalization=*/false);
    case MetricKind::cosine_similarity: {
      for (auto& p : pairs) {
        if (p.ref.is_string() && trim(p.ref.get<std::string>()) == missing_token) p.ref = "";
        if (p.pred.is_string() && trim(p.pred.get<std::string>()) == missing_token) p.pred = "";
      }
      return text_similarity(pairs, embedder);
    }
    case MetricKind::symmetric_similarity:
      return list_symmetric_similarity(pairs, embedder);
  }
  throw EmptyInput("variable_metric: unknown metric");
}

inline bool metric_is_symmetric(MetricKind m) { return m != MetricKind::balanced_accuracy; }

// ---------------------------------------------------------------------------
// Bootstrap confidence intervals

/// Percentile interval of a statistic over seeded resamples drawn with
/// replacement. The resample unit is whatever the indices refer to; the
/// harness always passes report indices so all variables move together.
template <typename Stat>
CI bootstrap_ci(Stat&& statistic, size_t data_size, int n_resamples = 1000, double level = 0.95,
                std::uint64_t seed = 0) {
  if (data_size == 0) throw EmptyInput("bootstrap_ci: empty data");
  DetRng rng(seed);
  std::vector<double> stats;
  stats.reserve(static_cast<size_t>(n_resamples));
  std::vector<size_t> indices(data_size);
  for (int b = 0; b < n_resamples; ++b) {
    for (size_t i = 0; i < data_size; ++i) indices[i] = rng.bounded(data_size);
    double v = statistic(static_cast<const std::vector<size_t>&>(indices));
    if (std::isfinite(v)) stats.push_back(v);
  }
  if (stats.empty()) throw EmptyInput("bootstrap_ci: statistic undefined on every resample");
  std::sort(stats.begin(), stats.end());
  double alpha = 1.0 - level;
  return {quantile_sorted(stats, alpha / 2.0), quantile_sorted(stats, 1.0 - alpha / 2.0)};
}

// ---------------------------------------------------------------------------
// Inter-rater agreement

struct AnnotationSet {
  std::string report_id;
  std::map<std::string, OrderedJson> raters;  // rater id -> record values
  OrderedJson consensus = OrderedJson::object();
};

struct AgreementResult {
  std::vector<VariableScore> variables;
  double macro = 0.0;
};

/// Mean pairwise agreement among raters, per variable, using the variable's
/// own metric. Direction-dependent metrics are averaged both ways so
/// agreement is symmetric by construction.
inline AgreementResult inter_rater_agreement(const std::vector<AnnotationSet>& sets,
                                             const std::vector<FieldSpec>& fields,
                                             Embedder& embedder, const std::string& missing_token) {
  std::set<std::string> rater_ids;
  for (const auto& s : sets)
    for (const auto& [rater, _] : s.raters) rater_ids.insert(rater);
  if (rater_ids.size() < 2) throw FewerThanTwoRaters("need at least two raters");

  std::vector<std::string> raters(rater_ids.begin(), rater_ids.end());
  AgreementResult result;
  std::vector<double> macro_terms;
  for (const auto& field : fields) {
    std::vector<double> pair_values;
    int covered_reports = 0;
    for (size_t a = 0; a < raters.size(); ++a) {
      for (size_t b = a + 1; b < raters.size(); ++b) {
        std::vector<LabeledPair> forward;
        for (const auto& s : sets) {
          auto ia = s.raters.find(raters[a]);
          auto ib = s.raters.find(raters[b]);
          if (ia == s.raters.end() || ib == s.raters.end()) continue;
          if (!ia->second.contains(field.name) || !ib->second.contains(field.name)) continue;
          forward.push_back({ia->second.at(field.name), ib->second.at(field.name), s.report_id});
        }
        if (forward.empty()) continue;
        covered_reports = std::max(covered_reports, static_cast<int>(forward.size()));
        double value = variable_metric(field, forward, embedder, missing_token);
        if (!metric_is_symmetric(field.metric)) {
          std::vector<LabeledPair> backward;
          backward.reserve(forward.size());
          for (const auto& p : forward) backward.push_back({p.pred, p.ref, p.report_id});
          value = 0.5 * (value + variable_metric(field, backward, embedder, missing_token));
        }
        pair_values.push_back(value);
      }
    }
    if (pair_values.empty()) continue;
    VariableScore vs;
    vs.variable = field.name;
    vs.metric = field.metric;
    vs.value = mean_of(pair_values);
    vs.n = covered_reports;
    result.variables.push_back(vs);
    macro_terms.push_back(vs.value);
  }
  if (result.variables.empty())
    throw FewerThanTwoRaters("no variable is covered by two raters on any report");
  result.macro = mean_of(macro_terms);
  return result;
}

}  // namespace medex
