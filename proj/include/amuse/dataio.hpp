#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "amuse/objective.hpp"
#include "amuse/selector.hpp"

namespace amuse {

// Shortest round-trip decimal representation (%.17g).
std::string fmt_double(double x);

// Writes via a temp file in the same directory, then renames.
void write_text_atomic(const std::string& path, const std::string& content);

// FNV-1a 64-bit digest of a file's bytes, as 16 hex characters.
std::string file_digest(const std::string& path);

// One row of the feature CSV: `video_id,frame_id,label_set,f1..fd` with
// labels '|'-separated (empty for unlabeled rows).
struct FeatureRow {
  std::string video_id;
  int frame_id = 0;
  std::vector<std::string> labels;
  Vec features;
};

void write_feature_csv(const std::vector<FeatureRow>& rows, const std::string& path);
std::vector<FeatureRow> read_feature_csv(const std::string& path);

// Candidate manifest `video_id,frame_id,cluster_size,representativeness`.
struct CandidateRow {
  std::string video_id;
  int frame_id = 0;
  int cluster_size = 0;
  double representativeness = 0.0;
};

void write_candidate_csv(const std::vector<CandidateRow>& rows, const std::string& path);
std::vector<CandidateRow> read_candidate_csv(const std::string& path);

// Ground-truth sidecar `video_id<TAB>frame_id`, no header.
void write_truth_tsv(const std::vector<std::pair<std::string, int>>& truth,
                     const std::string& path);
std::vector<std::pair<std::string, int>> read_truth_tsv(const std::string& path);

// Joins candidate-frame features, cluster stats and (optionally) ground
// truth into per-video records, erroring on dangling references.
std::vector<VideoRecord> assemble_videos(
    const std::vector<FeatureRow>& features,
    const std::vector<CandidateRow>& candidates,
    const std::vector<std::pair<std::string, int>>* truth);

// Model checkpoint: versioned binary header (dims, seed, hyperparameters)
// followed by each tensor row-major as little-endian float64, in the order
// adapter_w1, adapter_b1, adapter_w2, adapter_b2, attn_w, vis_w.
struct Checkpoint {
  ModelParams params;
  uint64_t seed = 0;
  Hyper hyper;
  double lambda = 0.2;
};

void save_checkpoint(const Checkpoint& ck, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

// Flat `key = value` config file; '#' starts a comment line.
std::map<std::string, std::string> parse_config_file(const std::string& path);

}  // namespace amuse
