#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "amuse/linalg.hpp"

namespace amuse {

struct ModelDims {
  int d_raw = 0;      // raw feature dimension
  int d_hidden = 256; // adapter hidden width
  int d_feat = 0;     // adapter output / attention dimension
  int d_sem = 0;      // semantic dimension, must match the word space

  void validate() const;  // throws std::invalid_argument
  bool operator==(const ModelDims&) const = default;
};

// All trainable tensors.
struct ModelParams {
  ModelDims dims;
  Mat adapter_w1;  // d_hidden x d_raw
  Vec adapter_b1;  // d_hidden
  Mat adapter_w2;  // d_feat x d_hidden
  Vec adapter_b2;  // d_feat
  Mat attn_w;      // d_feat x d_sem, semantic-attention projection
  Mat vis_w;       // d_sem x d_feat, visual-semantic transform

  bool all_finite() const;
};

// Per-input forward record. `hidden` and `feature` are the two layers the
// domain-alignment penalty taps; the per-word slots are filled by loss code
// and by callers that want to inspect attention.
struct ForwardTrace {
  Vec hidden;   // post-ReLU adapter hidden layer
  Vec feature;  // adapter output v (linear)
  std::vector<std::string> words;
  std::vector<Vec> attention;  // a_w per word
  std::vector<Vec> attended;   // a_w ⊙ v per word
  std::vector<double> scores;
};

// Xavier-uniform init: each weight matrix of shape m x n is filled row-major
// with i.i.d. uniform(-a, a), a = sqrt(6/(m+n)), from one SplitMix64 stream
// seeded with `seed`; biases are zero and consume no draws. Tensor order:
// adapter_w1, adapter_w2, attn_w, vis_w. Identical (dims, seed) give
// bit-identical parameters.
ModelParams init_params(const ModelDims& dims, uint64_t seed);

// hidden = ReLU(W1 x + b1); v = W2 hidden + b2 (linear output).
ForwardTrace adapt(const ModelParams& params, const Vec& x);

// a_w = ReLU(attn_w · s_w); elementwise nonnegative. The weight-decay term
// on attn_w lives in the training objective, not here.
Vec semantic_attention(const ModelParams& params, const Vec& s_w);

// Elementwise gate: v̂_w[i] = a_w[i] * v[i].
Vec attend(const Vec& a_w, const Vec& v);

// Bilinear similarity s_wᵀ (vis_w · v̂_w).
double score(const ModelParams& params, const Vec& s_w, const Vec& v_hat);

}  // namespace amuse
