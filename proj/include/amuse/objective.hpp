#pragma once

#include <string>
#include <vector>

#include "amuse/model.hpp"
#include "amuse/wordspace.hpp"

namespace amuse {

// Convex combination of Gaussian kernels.
struct KernelBank {
  std::vector<double> sigmas;  // strictly positive, strictly increasing
  std::vector<double> betas;   // nonnegative, sum to 1

  void validate() const;  // throws std::invalid_argument
};

// Bandwidth ladder {σ0/4, σ0/2, σ0, 2σ0, 4σ0} with uniform betas, σ0 the
// median pairwise distance over `combined` (median heuristic). Falls back
// to σ0 = 1 when the points are degenerate. The bank is built once per
// batch and treated as constant by the gradients.
KernelBank median_heuristic_bank(const std::vector<Vec>& combined, int m = 5);

// exp(-||x-y||^2 / (2 sigma^2)), in (0, 1].
double gaussian_kernel(const Vec& x, const Vec& y, double sigma);

// Biased V-statistic estimate of the multi-kernel MMD between the two
// sample sets. Symmetric in its arguments bit-for-bit; >= -1e-12.
double mk_mmd(const std::vector<Vec>& source, const std::vector<Vec>& target,
              const KernelBank& bank);

struct Hyper {
  double alpha = 0.5;   // hinge margin
  double eta = 1e-4;    // weight decay on vis_w
  double gamma = 1e-4;  // weight decay on attn_w
  double mu = 0.25;     // domain-alignment penalty
  // When true, the negative-word score uses the vector attended toward the
  // negative word instead of the positive one. Off by default.
  bool attend_negatives = false;
};

struct LossBreakdown {
  double hinge = 0.0;  // mean over source examples, no regularizers
  double reg_v = 0.0;  // eta * ||vis_w||_F^2
  double reg_a = 0.0;  // gamma * ||attn_w||_F^2
  double mmd = 0.0;    // hidden-layer + feature-layer discrepancy
  double total = 0.0;  // hinge + reg_v + reg_a + mu * mmd
};

// One labeled source example with its sampled negatives. `negatives[i]`
// belongs to `positives[i]`; sampling happens at batch assembly so the
// loss is a pure function of (params, batch).
struct SourceExample {
  Vec x;
  std::vector<std::string> positives;
  std::vector<std::vector<std::string>> negatives;
};

struct TrainBatch {
  std::vector<SourceExample> source;
  std::vector<Vec> target;
};

// Margin-ranking loss for one example:
//   sum_{w in positives} sum_{j in negatives} max(0, alpha - p_w + p_j)
//   + eta * ||vis_w||_F^2,
// where both scores gate the feature with the attention of the positive
// word w. `trace` must come from adapt() on the example's input; the
// per-word attention, attended vectors and scores are appended to it.
double hinge_rank_loss(const ModelParams& params, const WordSpace& ws,
                       ForwardTrace& trace,
                       const std::vector<std::string>& positives,
                       const std::vector<std::string>& negatives,
                       double alpha, double eta,
                       bool attend_negatives = false);

// Full objective over a batch. The hinge component is averaged over source
// examples; the discrepancy is measured at the adapter hidden layer and at
// the adapter output, both with `bank`.
LossBreakdown total_loss(const ModelParams& params, const WordSpace& ws,
                         const TrainBatch& batch, const KernelBank& bank,
                         const Hyper& hyper);

struct Gradients {
  Mat adapter_w1;
  Vec adapter_b1;
  Mat adapter_w2;
  Vec adapter_b2;
  Mat attn_w;
  Mat vis_w;

  static Gradients zeros(const ModelDims& dims);
};

// Exact gradient of total_loss with respect to every tensor. At hinge and
// ReLU kinks the zero branch of the subgradient is taken.
Gradients gradients(const ModelParams& params, const WordSpace& ws,
                    const TrainBatch& batch, const KernelBank& bank,
                    const Hyper& hyper);

// Loss and gradients from one pass; what the training loop calls.
LossBreakdown total_loss_with_gradients(const ModelParams& params,
                                        const WordSpace& ws,
                                        const TrainBatch& batch,
                                        const KernelBank& bank,
                                        const Hyper& hyper, Gradients* grads);

}  // namespace amuse
