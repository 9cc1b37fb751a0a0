#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "medex/errors.hpp"
#include "medex/util.hpp"

namespace medex {

using Vector = std::vector<double>;

inline double cosine(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw EmbeddingUnavailable("vector dimensions differ");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

inline void l2_normalize(Vector& v) {
  double n = 0.0;
  for (double x : v) n += x * x;
  if (n == 0.0) return;
  n = std::sqrt(n);
  for (double& x : v) x /= n;
}

/// Maps texts to unit-norm dense vectors. Production runs point this at an
/// embeddings endpoint (the documented default model is
/// embeddinggemma-300m-medical); offline runs use the hashed n-gram fallback.
class Embedder {
 public:
  virtual ~Embedder() = default;

  virtual std::vector<Vector> embed(const std::vector<std::string>& texts) = 0;

  Vector embed_one(const std::string& text) { return embed({text}).front(); }

  double similarity(const std::string& a, const std::string& b) {
    auto vs = embed({a, b});
    return cosine(vs[0], vs[1]);
  }
};

/// Deterministic offline embedder: term-frequency vectors over hashed
/// character 3-grams of the normalized text, L2-normalized. Whitespace-only
/// text maps to the zero vector (cosine 0 against everything).
class FallbackEmbedder : public Embedder {
 public:
  explicit FallbackEmbedder(size_t dim = 384) : dim_(dim) {}

  size_t dim() const { return dim_; }

  std::vector<Vector> embed(const std::vector<std::string>& texts) override {
    std::vector<Vector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(embed_text(t));
    return out;
  }

  Vector embed_text(const std::string& text) const {
    Vector v(dim_, 0.0);
    std::string norm = normalize_text(text);
    if (norm.empty()) return v;
    std::string padded;
    padded.reserve(norm.size() + 2);
    padded.push_back('\x02');
    padded += norm;
    padded.push_back('\x03');
    const size_t n = 3;
    if (padded.size() <= n) {
      v[fnv1a64(padded) % dim_] += 1.0;
    } else {
      for (size_t i = 0; i + n <= padded.size(); ++i)
        v[fnv1a64(std::string_view(padded).substr(i, n)) % dim_] += 1.0;
    }
    l2_normalize(v);
    return v;
  }

 private:
  size_t dim_;
};

/// Memoizing decorator; embedding calls are pure so results can be shared
/// across concurrent scorers.
class CachingEmbedder : public Embedder {
 public:
  explicit CachingEmbedder(std::shared_ptr<Embedder> inner) : inner_(std::move(inner)) {}

  std::vector<Vector> embed(const std::vector<std::string>& texts) override {
    std::vector<Vector> out(texts.size());
    std::vector<std::string> misses;
    std::vector<size_t> miss_idx;
    {
      std::lock_guard<std::mutex> lock(mu_);
      for (size_t i = 0; i < texts.size(); ++i) {
        auto it = memo_.find(texts[i]);
        if (it != memo_.end()) {
          out[i] = it->second;
        } else {
          misses.push_back(texts[i]);
          miss_idx.push_back(i);
        }
      }
    }
    if (!misses.empty()) {
      auto fresh = inner_->embed(misses);
      std::lock_guard<std::mutex> lock(mu_);
      for (size_t j = 0; j < misses.size(); ++j) {
        memo_[misses[j]] = fresh[j];
        out[miss_idx[j]] = fresh[j];
      }
    }
    return out;
  }

 private:
  std::shared_ptr<Embedder> inner_;
  std::mutex mu_;
  std::map<std::string, Vector> memo_;
};

}  // namespace medex
