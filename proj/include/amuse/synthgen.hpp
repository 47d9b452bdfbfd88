#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "amuse/selector.hpp"
#include "amuse/trainer.hpp"
#include "amuse/wordspace.hpp"

namespace amuse {

// Parameters of the planted synthetic corpus. The defaults give a corpus
// small enough for a laptop run but with enough signal that training is
// clearly separated from the random baseline.
struct SynthSpec {
  int n_videos = 200;
  int frames_min = 7;
  int frames_max = 12;
  int n_labels = 40;
  int n_topics = 20;
  int n_source = 2400;  // labeled source examples
  int d_raw = 64;
  // Kept well below n_labels so the label constraints pin the score map on
  // the whole semantic space; that is what makes unseen-word scoring work.
  int d_sem = 16;
  double noise_sigma = 0.05;
  double zero_shot_frac = 0.3;  // fraction of topic words absent from labels
  // Affine domain shift applied to every target-domain feature. The offset
  // alone barely moves a per-video argmax, so the scale range carries most
  // of the distortion.
  double shift_scale_lo = 0.1;
  double shift_scale_hi = 1.9;
  double shift_offset_norm = 2.5;
  uint64_t seed = 7;

  void validate() const;
};

struct SynthCorpus {
  WordSpace ws;
  TopicList topics;
  std::vector<LabeledExample> source;  // source domain, labeled
  std::vector<Vec> target_pool;        // all candidate features, shifted domain
  std::vector<VideoRecord> videos;     // shifted domain, with ground truth

  // Generator introspection, for tests only (never serialized).
  std::vector<std::vector<Vec>> true_content;  // semantic content per candidate
  Mat lift;                                    // d_raw x d_sem
  std::vector<std::string> zero_shot_words;
  std::vector<std::string> seen_topic_words;
};

// Deterministic given spec.seed: prototypes are drawn on the unit sphere,
// source features are lifted label mixtures plus Gaussian noise, each
// video's ground-truth frame mixes high-weight topic words while
// distractors mix off-topic labels, and all target-domain features get a
// fixed affine shift so the domain-alignment penalty has signal.
SynthCorpus generate_corpus(const SynthSpec& spec);

// Ideal popularity of a semantic content vector: the weight-averaged
// similarity to the topic prototypes. Used by tests to check the planted
// signal without touching any trained model.
double ideal_popularity(const SynthCorpus& corpus, const Vec& content);

// Writes wordvecs.txt, topics.tsv, source.csv, target.csv, videos.csv,
// candidates.csv, truth.tsv under `dir`.
void write_corpus(const SynthCorpus& corpus, const std::string& dir);

}  // namespace amuse
