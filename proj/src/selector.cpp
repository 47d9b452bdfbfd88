#include "amuse/selector.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "amuse/dataio.hpp"

#include "json.hpp"

namespace amuse {

void VideoRecord::validate() const {
  if (candidates.empty()) {
    throw std::invalid_argument("video '" + video_id + "' has no candidates");
  }
  std::unordered_set<int> ids;
  for (const auto& c : candidates) {
    if (!ids.insert(c.frame_id).second) {
      throw std::invalid_argument("video '" + video_id + "' has duplicate frame id " +
                                  std::to_string(c.frame_id));
    }
  }
  if (ground_truth && !ids.count(*ground_truth)) {
    throw std::invalid_argument("video '" + video_id +
                                "' ground truth is not among its candidates");
  }
}

double popularity(const ModelParams& params, const WordSpace& ws,
                  const TopicList& topics, const Vec& feature, bool raw_counts) {
  if (topics.items.empty()) {
    throw std::invalid_argument("popularity: empty topic list");
  }
  ForwardTrace trace = adapt(params, feature);
  double total = 0.0;
  for (const auto& topic : topics.items) {
    auto proto = ws.prototype(topic.word);
    if (!proto) {
      throw std::invalid_argument("popularity: topic word '" + topic.word +
                                  "' has no prototype (filter the list first)");
    }
    Vec a = semantic_attention(params, *proto);
    Vec vhat = attend(a, trace.feature);
    double sc = score(params, *proto, vhat);
    total += (raw_counts ? double(topic.count) : topic.weight) * sc;
  }
  return total;
}

size_t argmax_fused(const std::vector<double>& pops,
                    const std::vector<double>& reprs,
                    const std::vector<int>& frame_ids, double lambda) {
  if (pops.empty() || pops.size() != reprs.size() || pops.size() != frame_ids.size()) {
    throw std::invalid_argument("argmax_fused: empty or mismatched score arrays");
  }
  size_t best = 0;
  double best_fused = pops[0] + lambda * reprs[0];
  for (size_t i = 1; i < pops.size(); ++i) {
    double fused = pops[i] + lambda * reprs[i];
    if (fused > best_fused ||
        (fused == best_fused && frame_ids[i] < frame_ids[best])) {
      best = i;
      best_fused = fused;
    }
  }
  return best;
}

int select_thumbnail(const ModelParams& params, const WordSpace& ws,
                     const TopicList& topics, const VideoRecord& video,
                     double lambda, bool raw_counts,
                     std::vector<ScoredFrame>* out) {
  video.validate();
  std::vector<double> pops, reprs;
  std::vector<int> ids;
  for (const auto& c : video.candidates) {
    pops.push_back(popularity(params, ws, topics, c.feature, raw_counts));
    reprs.push_back(c.representativeness);
    ids.push_back(c.frame_id);
  }
  size_t best = argmax_fused(pops, reprs, ids, lambda);
  if (out) {
    out->clear();
    for (size_t i = 0; i < ids.size(); ++i) {
      ScoredFrame s;
      s.frame_id = ids[i];
      s.popularity = pops[i];
      s.representativeness = reprs[i];
      s.fused = pops[i] + lambda * reprs[i];
      s.selected = (i == best);
      out->push_back(s);
    }
  }
  return ids[best];
}

EvalResult evaluate(const ModelParams& params, const WordSpace& ws,
                    const TopicList& topics,
                    const std::vector<VideoRecord>& corpus, double lambda,
                    bool raw_counts) {
  if (corpus.empty()) {
    throw std::invalid_argument("evaluate: empty corpus");
  }
  EvalResult result;
  int hits = 0;
  for (const auto& video : corpus) {
    if (!video.ground_truth) {
      throw std::invalid_argument("evaluate: video '" + video.video_id +
                                  "' has no ground truth");
    }
    EvalRow row;
    row.video_id = video.video_id;
    row.selected = select_thumbnail(params, ws, topics, video, lambda,
                                    raw_counts, &row.frames);
    row.hit = (row.selected == *video.ground_truth);
    if (row.hit) ++hits;
    result.rows.push_back(std::move(row));
  }
  result.accuracy = double(hits) / double(corpus.size());
  return result;
}

int random_select(const VideoRecord& video, SplitMix64& rng) {
  video.validate();
  size_t pick = size_t(rng.next_below(video.candidates.size()));
  return video.candidates[pick].frame_id;
}

double random_accuracy(const std::vector<VideoRecord>& corpus, uint64_t seed) {
  if (corpus.empty()) throw std::invalid_argument("random_accuracy: empty corpus");
  SplitMix64 rng(seed);
  int hits = 0;
  for (const auto& video : corpus) {
    if (!video.ground_truth) {
      throw std::invalid_argument("random_accuracy: video '" + video.video_id +
                                  "' has no ground truth");
    }
    if (random_select(video, rng) == *video.ground_truth) ++hits;
  }
  return double(hits) / double(corpus.size());
}

std::string score_report_csv(const std::vector<EvalRow>& rows) {
  std::string out = "video_id,frame_id,popularity,representativeness,fused,selected\n";
  for (const auto& row : rows) {
    for (const auto& f : row.frames) {
      out += row.video_id;
      out += ',';
      out += std::to_string(f.frame_id);
      out += ',';
      out += fmt_double(f.popularity);
      out += ',';
      out += fmt_double(f.representativeness);
      out += ',';
      out += fmt_double(f.fused);
      out += ',';
      out += f.selected ? '1' : '0';
      out += '\n';
    }
  }
  return out;
}

std::string eval_summary_json(double accuracy_mean, double accuracy_std,
                              const std::vector<uint64_t>& seeds, double lambda) {
  nlohmann::json j;
  j["accuracy_mean"] = accuracy_mean;
  j["accuracy_std"] = accuracy_std;
  j["seeds"] = seeds;
  j["lambda"] = lambda;
  return j.dump() + "\n";
}

}  // namespace amuse
