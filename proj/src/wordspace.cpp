#include "amuse/wordspace.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "amuse/dataio.hpp"

namespace amuse {

void WordSpace::insert(const std::string& token, const Vec& v) {
  if (index_.count(token)) {
    throw std::invalid_argument("duplicate token: " + token);
  }
  if (dim_ == 0) {
    dim_ = static_cast<int>(v.size());
    if (dim_ == 0) throw std::invalid_argument("empty vector for token: " + token);
  } else if (v.size() != dim_) {
    throw std::invalid_argument("dimension mismatch for token: " + token);
  }
  if (!v.allFinite()) {
    throw std::invalid_argument("non-finite component for token: " + token);
  }
  double norm = v.norm();
  if (norm == 0.0) {
    throw std::invalid_argument("zero vector cannot be normalized: " + token);
  }
  index_.emplace(token, tokens_.size());
  tokens_.push_back(token);
  vectors_.push_back(v / norm);
}

std::optional<Vec> WordSpace::prototype(const std::string& word) const {
  auto it = index_.find(word);
  if (it == index_.end()) return std::nullopt;
  return vectors_[it->second];
}

WordSpace load_word_vectors(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open word-vector file: " + path);

  WordSpace ws;
  std::string line;
  size_t line_no = 0;
  int dim = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string token;
    if (!(ss >> token)) continue;

    std::vector<double> vals;
    std::string field;
    while (ss >> field) {
      char* end = nullptr;
      double x = std::strtod(field.c_str(), &end);
      if (end == field.c_str() || *end != '\0') {
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": cannot parse value '" + field + "'");
      }
      if (!std::isfinite(x)) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": non-finite value for token '" + token + "'");
      }
      vals.push_back(x);
    }
    if (vals.empty()) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": no vector components for token '" + token + "'");
    }
    if (dim < 0) {
      dim = static_cast<int>(vals.size());
    } else if (static_cast<int>(vals.size()) != dim) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected " + std::to_string(dim) + " components, got " +
                               std::to_string(vals.size()));
    }
    Vec v = Eigen::Map<const Vec>(vals.data(), static_cast<Eigen::Index>(vals.size()));
    try {
      ws.insert(token, v);
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (ws.size() == 0) {
    throw std::runtime_error("word-vector file is empty: " + path);
  }
  return ws;
}

void write_word_vectors(const WordSpace& ws, const std::string& path) {
  std::string out;
  for (size_t i = 0; i < ws.size(); ++i) {
    out += ws.tokens()[i];
    const Vec& v = ws.vector_at(i);
    for (Eigen::Index k = 0; k < v.size(); ++k) {
      out += ' ';
      out += fmt_double(v[k]);
    }
    out += '\n';
  }
  write_text_atomic(path, out);
}

TopicList load_topic_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open topic list: " + path);

  TopicList topics;
  std::set<std::string> seen;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected 'word<TAB>count'");
    }
    std::string word = line.substr(0, tab);
    std::string count_str = line.substr(tab + 1);
    char* end = nullptr;
    long long count = std::strtoll(count_str.c_str(), &end, 10);
    if (end == count_str.c_str() || *end != '\0') {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": cannot parse count '" + count_str + "'");
    }
    if (count < 0) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": negative count for word '" + word + "'");
    }
    if (!seen.insert(word).second) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": duplicate word '" + word + "'");
    }
    topics.items.push_back({word, count, 0.0});
  }
  if (topics.items.empty()) {
    throw std::runtime_error("topic list is empty: " + path);
  }
  normalize_topic_weights(topics);
  return topics;
}

void write_topic_list(const TopicList& topics, const std::string& path) {
  std::string out;
  for (const auto& t : topics.items) {
    out += t.word;
    out += '\t';
    out += std::to_string(t.count);
    out += '\n';
  }
  write_text_atomic(path, out);
}

void normalize_topic_weights(TopicList& topics) {
  long long total = 0;
  for (const auto& t : topics.items) total += t.count;
  if (total <= 0) {
    throw std::runtime_error("topic list has no positive counts; weights undefined");
  }
  for (auto& t : topics.items) {
    t.weight = static_cast<double>(t.count) / static_cast<double>(total);
  }
}

TopicList filter_topics(const TopicList& topics, const WordSpace& ws) {
  TopicList kept;
  for (const auto& t : topics.items) {
    if (ws.contains(t.word)) {
      kept.items.push_back(t);
    } else {
      std::clog << "warning: topic word '" << t.word
                << "' has no word vector; skipping\n";
    }
  }
  if (!kept.items.empty()) normalize_topic_weights(kept);
  return kept;
}

}  // namespace amuse
