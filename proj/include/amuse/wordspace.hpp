#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "amuse/linalg.hpp"

namespace amuse {

// Token -> unit-normalized semantic vector table. Immutable once loaded;
// safe for any number of concurrent readers.
class WordSpace {
 public:
  WordSpace() = default;

  int dim() const { return dim_; }
  size_t size() const { return tokens_.size(); }

  // Inserts a vector, normalizing it to unit L2 norm. Rejects duplicates,
  // dimension mismatches, non-finite components and zero vectors.
  void insert(const std::string& token, const Vec& v);

  // The normalized vector for `word`, or nullopt when absent. Absence is
  // a value, not an error; callers decide policy.
  std::optional<Vec> prototype(const std::string& word) const;

  bool contains(const std::string& word) const {
    return index_.count(word) != 0;
  }

  // Insertion order, used for deterministic serialization.
  const std::vector<std::string>& tokens() const { return tokens_; }
  const Vec& vector_at(size_t i) const { return vectors_[i]; }

 private:
  int dim_ = 0;
  std::vector<std::string> tokens_;
  std::vector<Vec> vectors_;
  std::unordered_map<std::string, size_t> index_;
};

struct TopicEntry {
  std::string word;
  long long count = 0;   // raw frequency
  double weight = 0.0;   // count / sum of counts
};

// Popular-topic words with raw frequencies and normalized weights.
// Order is the file order.
struct TopicList {
  std::vector<TopicEntry> items;
};

// Text format: one entry per line, `token v1 v2 ... vd`, single spaces.
// The dimension is inferred from the first line. Errors carry the
// offending 1-based line number.
WordSpace load_word_vectors(const std::string& path);
void write_word_vectors(const WordSpace& ws, const std::string& path);

// TSV `word<TAB>count`, no header. Weights are count / sum(counts).
TopicList load_topic_list(const std::string& path);
void write_topic_list(const TopicList& topics, const std::string& path);

// Drops topic words that have no prototype in `ws` (warning to std::clog)
// and re-normalizes the weights over the survivors. The scoring path
// needs a prototype per word, so unknown words are unusable.
TopicList filter_topics(const TopicList& topics, const WordSpace& ws);

// Recomputes weights from counts. Errors on all-zero counts.
void normalize_topic_weights(TopicList& topics);

}  // namespace amuse
