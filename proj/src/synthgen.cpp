#include "amuse/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include "amuse/dataio.hpp"
#include "amuse/rng.hpp"

namespace amuse {

void SynthSpec::validate() const {
  if (n_videos < 1 || n_labels < 1 || n_topics < 1 || n_source < 1) {
    throw std::invalid_argument("synth spec: counts must be positive");
  }
  if (frames_min < 1 || frames_max < frames_min) {
    throw std::invalid_argument("synth spec: invalid frame range");
  }
  if (d_raw < 1 || d_sem < 1) {
    throw std::invalid_argument("synth spec: dimensions must be positive");
  }
  if (noise_sigma < 0.0) {
    throw std::invalid_argument("synth spec: noise must be >= 0");
  }
  if (zero_shot_frac < 0.0 || zero_shot_frac > 1.0) {
    throw std::invalid_argument("synth spec: zero-shot fraction must be in [0,1]");
  }
  if (shift_scale_lo <= 0.0 || shift_scale_hi < shift_scale_lo) {
    throw std::invalid_argument("synth spec: invalid shift scale range");
  }
  int n_zs = int(std::llround(zero_shot_frac * n_topics));
  if (n_topics - n_zs > n_labels) {
    throw std::invalid_argument("synth spec: more seen topics than labels");
  }
}

namespace {

Vec random_unit(int dim, SplitMix64& rng) {
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v[i] = rng.normal();
  double n = v.norm();
  if (n == 0.0) v[0] = 1.0;  // unreachable in practice
  else v /= n;
  return v;
}

std::string tag(const char* prefix, int i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%03d", prefix, i);
  return buf;
}

// k distinct indices with probability proportional to `weights`.
std::vector<int> weighted_sample_distinct(std::vector<double> weights, int k,
                                          SplitMix64& rng) {
  std::vector<int> chosen;
  for (int round = 0; round < k; ++round) {
    double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (total <= 0.0) break;
    double r = rng.next_double() * total;
    int pick = -1;
    double acc = 0.0;
    for (size_t j = 0; j < weights.size(); ++j) {
      if (weights[j] <= 0.0) continue;
      acc += weights[j];
      pick = int(j);
      if (r < acc) break;
    }
    chosen.push_back(pick);
    weights[pick] = 0.0;
  }
  return chosen;
}

Vec mix_prototypes(const WordSpace& ws, const std::vector<std::string>& words) {
  Vec c = Vec::Zero(ws.dim());
  for (const auto& w : words) c += *ws.prototype(w);
  double n = c.norm();
  if (n > 0.0) c /= n;
  return c;
}

}  // namespace

SynthCorpus generate_corpus(const SynthSpec& spec) {
  spec.validate();
  SplitMix64 rng(spec.seed);
  SynthCorpus corpus;

  // Vocabulary: label words plus extra zero-shot topic words.
  std::vector<std::string> labels;
  for (int i = 0; i < spec.n_labels; ++i) {
    labels.push_back(tag("label_", i));
    corpus.ws.insert(labels.back(), random_unit(spec.d_sem, rng));
  }
  const int n_zs = int(std::llround(spec.zero_shot_frac * spec.n_topics));
  for (int i = 0; i < n_zs; ++i) {
    corpus.zero_shot_words.push_back(tag("unseen_", i));
    corpus.ws.insert(corpus.zero_shot_words.back(), random_unit(spec.d_sem, rng));
  }

  // Topic list: seen words drawn from the labels, unseen words appended,
  // then shuffled so decaying counts land on both groups.
  std::vector<size_t> label_order(labels.size());
  for (size_t i = 0; i < label_order.size(); ++i) label_order[i] = i;
  shuffle(label_order, rng);
  std::vector<std::string> topic_words;
  for (int i = 0; i < spec.n_topics - n_zs; ++i) {
    corpus.seen_topic_words.push_back(labels[label_order[i]]);
    topic_words.push_back(labels[label_order[i]]);
  }
  for (const auto& w : corpus.zero_shot_words) topic_words.push_back(w);
  shuffle(topic_words, rng);
  for (size_t i = 0; i < topic_words.size(); ++i) {
    long long count = llround(20000.0 * std::pow(0.75, double(i))) + 1;
    corpus.topics.items.push_back({topic_words[i], count, 0.0});
  }
  normalize_topic_weights(corpus.topics);

  // Semantic-to-raw lift and the fixed affine target shift.
  corpus.lift.resize(spec.d_raw, spec.d_sem);
  const double lift_scale = 1.0 / std::sqrt(double(spec.d_sem));
  for (int r = 0; r < spec.d_raw; ++r) {
    for (int c = 0; c < spec.d_sem; ++c) corpus.lift(r, c) = rng.normal() * lift_scale;
  }
  Vec shift_scale(spec.d_raw);
  for (int i = 0; i < spec.d_raw; ++i) {
    shift_scale[i] = rng.uniform(spec.shift_scale_lo, spec.shift_scale_hi);
  }
  Vec shift_offset = random_unit(spec.d_raw, rng) * spec.shift_offset_norm;

  auto lifted = [&](const Vec& content) {
    Vec x = corpus.lift * content;
    for (int i = 0; i < spec.d_raw; ++i) x[i] += spec.noise_sigma * rng.normal();
    return x;
  };
  auto shifted = [&](const Vec& x) {
    return Vec(shift_scale.cwiseProduct(x) + shift_offset);
  };

  // Labeled source examples (no shift).
  for (int i = 0; i < spec.n_source; ++i) {
    int n_pos = 1 + int(rng.next_below(3));
    n_pos = std::min(n_pos, spec.n_labels);
    std::vector<int> pick =
        weighted_sample_distinct(std::vector<double>(labels.size(), 1.0), n_pos, rng);
    LabeledExample ex;
    for (int p : pick) ex.labels.push_back(labels[p]);
    ex.x = lifted(mix_prototypes(corpus.ws, ex.labels));
    corpus.source.push_back(std::move(ex));
  }

  // Ground-truth content draws from the heavier half of the topic list.
  std::vector<double> gt_weights(corpus.topics.items.size(), 0.0);
  {
    std::vector<size_t> by_weight(corpus.topics.items.size());
    for (size_t i = 0; i < by_weight.size(); ++i) by_weight[i] = i;
    std::sort(by_weight.begin(), by_weight.end(), [&](size_t a, size_t b) {
      return corpus.topics.items[a].weight > corpus.topics.items[b].weight;
    });
    size_t top = (by_weight.size() + 1) / 2;
    for (size_t i = 0; i < top; ++i) {
      gt_weights[by_weight[i]] = corpus.topics.items[by_weight[i]].weight;
    }
  }
  std::unordered_set<std::string> topic_set(topic_words.begin(), topic_words.end());
  std::vector<std::string> off_topic;
  for (const auto& l : labels) {
    if (!topic_set.count(l)) off_topic.push_back(l);
  }
  if (off_topic.empty()) off_topic = labels;  // degenerate tiny specs

  // Distractor content is projected off the weighted topic directions
  // (seen and unseen parts separately), so a distractor frame carries no
  // accidental topic signal and the planted ordering is unambiguous.
  std::vector<Vec> topic_basis;
  {
    Vec mean_seen = Vec::Zero(spec.d_sem);
    Vec mean_unseen = Vec::Zero(spec.d_sem);
    std::unordered_set<std::string> unseen_set(corpus.zero_shot_words.begin(),
                                               corpus.zero_shot_words.end());
    for (const auto& t : corpus.topics.items) {
      Vec p = *corpus.ws.prototype(t.word) * t.weight;
      if (unseen_set.count(t.word)) mean_unseen += p;
      else mean_seen += p;
    }
    for (Vec m : {mean_seen, mean_unseen}) {
      for (const Vec& b : topic_basis) m -= b.dot(m) * b;
      if (m.norm() > 1e-9) topic_basis.push_back(m.normalized());
    }
  }
  auto off_topic_content = [&](const Vec& raw) {
    Vec c = raw;
    for (const Vec& b : topic_basis) c -= b.dot(c) * b;
    double n = c.norm();
    return n > 1e-6 ? Vec(c / n) : raw;
  };

  for (int v = 0; v < spec.n_videos; ++v) {
    const int k = spec.frames_min +
                  int(rng.next_below(uint64_t(spec.frames_max - spec.frames_min + 1)));
    const int gt = int(rng.next_below(uint64_t(k)));
    std::vector<int> cluster_sizes(k);
    for (int f = 0; f < k; ++f) cluster_sizes[f] = 1 + int(rng.next_below(5));
    // Mild correlation between ground truth and cluster mass: R carries
    // signal but far from enough on its own.
    if (rng.next_double() < 0.25) cluster_sizes[gt] += 3;
    int total_frames = std::accumulate(cluster_sizes.begin(), cluster_sizes.end(), 0);

    VideoRecord video;
    video.video_id = tag("vid_", v);
    video.ground_truth = gt;
    std::vector<Vec> contents;
    for (int f = 0; f < k; ++f) {
      std::vector<std::string> words;
      if (f == gt) {
        for (int idx : weighted_sample_distinct(gt_weights, 2, rng)) {
          words.push_back(corpus.topics.items[idx].word);
        }
      } else {
        for (int idx : weighted_sample_distinct(
                 std::vector<double>(off_topic.size(), 1.0), 3, rng)) {
          words.push_back(off_topic[idx]);
        }
      }
      Vec content = mix_prototypes(corpus.ws, words);
      if (f != gt) content = off_topic_content(content);
      CandidateFrame cf;
      cf.frame_id = f;
      cf.feature = shifted(lifted(content));
      cf.cluster_size = cluster_sizes[f];
      cf.representativeness = double(cluster_sizes[f]) / double(total_frames);
      corpus.target_pool.push_back(cf.feature);
      video.candidates.push_back(std::move(cf));
      contents.push_back(std::move(content));
    }
    video.validate();
    corpus.videos.push_back(std::move(video));
    corpus.true_content.push_back(std::move(contents));
  }
  return corpus;
}

double ideal_popularity(const SynthCorpus& corpus, const Vec& content) {
  double p = 0.0;
  for (const auto& t : corpus.topics.items) {
    p += t.weight * corpus.ws.prototype(t.word)->dot(content);
  }
  return p;
}

void write_corpus(const SynthCorpus& corpus, const std::string& dir) {
  std::filesystem::create_directories(dir);
  auto at = [&](const char* name) { return (std::filesystem::path(dir) / name).string(); };

  write_word_vectors(corpus.ws, at("wordvecs.txt"));
  write_topic_list(corpus.topics, at("topics.tsv"));

  std::vector<FeatureRow> source_rows;
  for (size_t i = 0; i < corpus.source.size(); ++i) {
    char vid[32];
    std::snprintf(vid, sizeof(vid), "src_%05zu", i);
    source_rows.push_back({vid, 0, corpus.source[i].labels, corpus.source[i].x});
  }
  write_feature_csv(source_rows, at("source.csv"));

  std::vector<FeatureRow> target_rows;
  for (size_t i = 0; i < corpus.target_pool.size(); ++i) {
    char vid[32];
    std::snprintf(vid, sizeof(vid), "tgt_%05zu", i);
    target_rows.push_back({vid, 0, {}, corpus.target_pool[i]});
  }
  write_feature_csv(target_rows, at("target.csv"));

  std::vector<FeatureRow> video_rows;
  std::vector<CandidateRow> candidate_rows;
  std::vector<std::pair<std::string, int>> truth;
  for (const auto& v : corpus.videos) {
    for (const auto& c : v.candidates) {
      video_rows.push_back({v.video_id, c.frame_id, {}, c.feature});
      candidate_rows.push_back(
          {v.video_id, c.frame_id, c.cluster_size, c.representativeness});
    }
    truth.emplace_back(v.video_id, *v.ground_truth);
  }
  write_feature_csv(video_rows, at("videos.csv"));
  write_candidate_csv(candidate_rows, at("candidates.csv"));
  write_truth_tsv(truth, at("truth.tsv"));
}

}  // namespace amuse
