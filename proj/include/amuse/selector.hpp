#pragma once

#include <optional>
#include <string>
#include <vector>

#include "amuse/frames.hpp"
#include "amuse/model.hpp"
#include "amuse/rng.hpp"
#include "amuse/wordspace.hpp"

namespace amuse {

struct VideoRecord {
  std::string video_id;
  std::vector<CandidateFrame> candidates;  // nonempty, unique frame ids
  std::optional<int> ground_truth;         // frame id among candidates

  void validate() const;
};

struct ScoredFrame {
  int frame_id = 0;
  double popularity = 0.0;
  double representativeness = 0.0;
  double fused = 0.0;  // popularity + lambda * representativeness
  bool selected = false;
};

// Frequency-weighted popularity of one frame: the adapter output is gated
// by each topic word's attention and scored against its prototype; terms
// are weighted by the normalized topic weight (or the raw count when
// `raw_counts` is set) and summed. Every topic word must have a prototype;
// run filter_topics() first.
double popularity(const ModelParams& params, const WordSpace& ws,
                  const TopicList& topics, const Vec& feature,
                  bool raw_counts = false);

// Deterministic argmax over fused = P + lambda * R; ties go to the lowest
// frame id. Exposed separately so the argmax rule is testable on bare
// score arrays.
size_t argmax_fused(const std::vector<double>& pops,
                    const std::vector<double>& reprs,
                    const std::vector<int>& frame_ids, double lambda);

// Scores every candidate of `video` and returns the selected frame id;
// per-frame scores via `out` when non-null.
int select_thumbnail(const ModelParams& params, const WordSpace& ws,
                     const TopicList& topics, const VideoRecord& video,
                     double lambda, bool raw_counts = false,
                     std::vector<ScoredFrame>* out = nullptr);

struct EvalRow {
  std::string video_id;
  std::vector<ScoredFrame> frames;
  int selected = 0;
  bool hit = false;
};

struct EvalResult {
  double accuracy = 0.0;
  std::vector<EvalRow> rows;
};

// Fraction of videos whose selected frame equals the ground truth. Every
// record must carry a ground truth; errors name the offending video.
EvalResult evaluate(const ModelParams& params, const WordSpace& ws,
                    const TopicList& topics,
                    const std::vector<VideoRecord>& corpus, double lambda,
                    bool raw_counts = false);

// Uniform-over-candidates reference selector.
int random_select(const VideoRecord& video, SplitMix64& rng);
double random_accuracy(const std::vector<VideoRecord>& corpus, uint64_t seed);

// Score-report CSV (`video_id,frame_id,popularity,representativeness,
// fused,selected`).
std::string score_report_csv(const std::vector<EvalRow>& rows);

// Single-line JSON evaluation summary.
std::string eval_summary_json(double accuracy_mean, double accuracy_std,
                              const std::vector<uint64_t>& seeds, double lambda);

}  // namespace amuse
