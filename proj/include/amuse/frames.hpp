#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "amuse/linalg.hpp"

namespace amuse {

// 8-bit grayscale or RGB image, row-major samples.
struct RawFrame {
  int width = 0;
  int height = 0;
  int channels = 1;  // 1 or 3
  std::vector<uint8_t> pixels;

  void validate() const;  // throws on inconsistent sizes
};

struct QualityThresholds {
  double dark = 0.12;    // minimum mean luma (0..1)
  double blur = 15.0;    // minimum Laplacian variance
  double entropy = 0.8;  // minimum histogram entropy (bits)
};

// Mean Rec.601 luma scaled to [0, 1].
double luma_mean(const RawFrame& frame);

// Variance of the 4-neighbor discrete Laplacian (center -4, cross +1) over
// interior luma pixels. Requires width, height >= 3.
double laplacian_variance(const RawFrame& frame);

// Shannon entropy (bits) of the 64-bin luma histogram; 0 for constant
// frames, at most 6.
double histogram_entropy(const RawFrame& frame);

// Indices of frames passing all three quality tests.
std::vector<int> quality_filter(const std::vector<RawFrame>& frames,
                                const QualityThresholds& thresholds);

// Greedy leader clustering over cosine distance: each vector joins the
// first cluster whose founding vector is within `tau`, else founds a new
// cluster. Returns member indices per cluster, in founding order.
std::vector<std::vector<int>> leader_cluster(const std::vector<Vec>& features,
                                             double tau);

// Index (into `members`) of the member minimizing summed cosine distance
// to the others; ties go to the lowest frame index.
int medoid_index(const std::vector<Vec>& features, const std::vector<int>& members);

struct CandidateFrame {
  int frame_id = 0;
  Vec feature;
  double representativeness = 0.0;  // cluster_size / total kept frames
  int cluster_size = 0;
};

// Mean-pooled 8x8 luma grid, centered to zero mean; the clustering feature
// for raw frames.
Vec frame_feature(const RawFrame& frame);

// Full candidate pipeline for one video: quality filter, near-duplicate
// clustering, medoid extraction. frame ids are indices into `frames`.
// Throws (naming `video_id`) when no frame survives the filter.
std::vector<CandidateFrame> extract_candidates(const std::vector<RawFrame>& frames,
                                               const QualityThresholds& thresholds,
                                               double tau,
                                               const std::string& video_id);

// Binary PGM (P5) / PPM (P6), 8-bit, maxval 255.
RawFrame read_pnm(const std::string& path);
void write_pnm(const RawFrame& frame, const std::string& path);

}  // namespace amuse
