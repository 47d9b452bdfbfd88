#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "amuse/objective.hpp"
#include "amuse/selector.hpp"

namespace amuse {

// Raised when a gradient tensor goes non-finite; carries the tensor name.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  Gradients m, v;
  long long step = 0;

  static AdamState zeros(const ModelDims& dims) {
    return {Gradients::zeros(dims), Gradients::zeros(dims), 0};
  }
};

// Bias-corrected adaptive-moment update, applied elementwise to every
// tensor. Throws NumericError naming the tensor on non-finite gradients.
void adam_step(ModelParams& params, const Gradients& grads, AdamState& state,
               double lr, const AdamConfig& adam);

struct TrainConfig {
  int batch_size = 512;
  double learning_rate = 1e-4;
  int max_epochs = 30;
  uint64_t seed = 42;
  Hyper hyper;
  double lambda = 0.2;  // fusion weight used for validation scoring
  int n_neg = 10;       // sampled negatives per positive word
  int d_hidden = 256;
  int d_feat = 0;  // 0: match the raw feature dimension
  AdamConfig adam;
  bool raw_counts = false;

  void validate() const;
};

struct LabeledExample {
  Vec x;
  std::vector<std::string> labels;
};

struct EpochRow {
  int epoch = 0;
  LossBreakdown loss;  // mean over the epoch's steps
  double val_acc = 0.0;
  double seconds = 0.0;
};

struct TrainHistory {
  std::vector<EpochRow> rows;
};

struct TrainResult {
  ModelParams params;  // epoch with best validation accuracy, earliest on ties
  TrainHistory history;
  int best_epoch = 0;  // 0 when no epoch ran
};

// Mini-batch Adam on the full objective. Shuffles per epoch, pairs every
// source batch with a same-size target batch (cycling with wraparound),
// samples negatives per step; all draws derive from config.seed, so equal
// (config, data) reproduce the history bit-for-bit.
TrainResult train(const TrainConfig& config, const WordSpace& ws,
                  const TopicList& topics,
                  const std::vector<LabeledExample>& source,
                  const std::vector<Vec>& target_pool,
                  const std::vector<VideoRecord>& valid);

// CSV `epoch,hinge,reg_v,reg_a,mmd,total,val_acc,seconds`.
std::string history_csv(const TrainHistory& history);

struct GridAxes {
  std::vector<int> batch_sizes{128, 256, 512};
  std::vector<double> learning_rates{1e-4, 5e-4, 1e-3, 5e-3, 1e-2};
  std::vector<double> alphas;   // empty: keep the base value
  std::vector<double> lambdas;  // empty: keep the base value
};

struct GridCell {
  TrainConfig config;
  double mean_accuracy = 0.0;
  std::vector<double> fold_accuracies;
  bool refined = false;  // added by the refinement pass
};

struct GridResult {
  TrainConfig best;
  double best_accuracy = 0.0;
  std::vector<GridCell> table;
};

// K-fold cross-validated grid search. Videos are dealt into folds by a
// seeded shuffle; each cell trains per fold (the fold's frames are held
// out of the target pool) and is scored by mean fold accuracy. After the
// coarse pass, each axis is re-gridded once around the winner at half
// resolution (midpoints toward the neighboring grid values).
GridResult grid_search(const GridAxes& axes, const TrainConfig& base, int folds,
                       const WordSpace& ws, const TopicList& topics,
                       const std::vector<LabeledExample>& source,
                       const std::vector<VideoRecord>& videos);

}  // namespace amuse
