#include "amuse/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <unordered_set>

#include "amuse/dataio.hpp"
#include "amuse/rng.hpp"

namespace amuse {

namespace {

// Child-seed stream ids (documented in the README).
constexpr uint64_t kStreamInit = 1;
constexpr uint64_t kStreamFolds = 2;
constexpr uint64_t kStreamShuffleBase = 1'000'000;
constexpr uint64_t kStreamNegativesBase = 2'000'000'000;
constexpr uint64_t kStreamGridBase = 3'000'000'000;

void adam_update(Mat& p, Mat& m, Mat& v, const Mat& g, double lr, double c1,
                 double c2, const AdamConfig& adam) {
  m = adam.beta1 * m + (1.0 - adam.beta1) * g;
  v = adam.beta2 * v.array().matrix() + (1.0 - adam.beta2) * g.array().square().matrix();
  p.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + adam.eps);
}

void adam_update(Vec& p, Vec& m, Vec& v, const Vec& g, double lr, double c1,
                 double c2, const AdamConfig& adam) {
  m = adam.beta1 * m + (1.0 - adam.beta1) * g;
  v = adam.beta2 * v.array().matrix() + (1.0 - adam.beta2) * g.array().square().matrix();
  p.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + adam.eps);
}

}  // namespace

void adam_step(ModelParams& params, const Gradients& grads, AdamState& state,
               double lr, const AdamConfig& adam) {
  auto check = [](const char* name, bool finite) {
    if (!finite) throw NumericError(std::string("non-finite gradient in tensor ") + name);
  };
  check("adapter_w1", grads.adapter_w1.allFinite());
  check("adapter_b1", grads.adapter_b1.allFinite());
  check("adapter_w2", grads.adapter_w2.allFinite());
  check("adapter_b2", grads.adapter_b2.allFinite());
  check("attn_w", grads.attn_w.allFinite());
  check("vis_w", grads.vis_w.allFinite());

  state.step += 1;
  const double c1 = 1.0 - std::pow(adam.beta1, double(state.step));
  const double c2 = 1.0 - std::pow(adam.beta2, double(state.step));
  adam_update(params.adapter_w1, state.m.adapter_w1, state.v.adapter_w1,
              grads.adapter_w1, lr, c1, c2, adam);
  adam_update(params.adapter_b1, state.m.adapter_b1, state.v.adapter_b1,
              grads.adapter_b1, lr, c1, c2, adam);
  adam_update(params.adapter_w2, state.m.adapter_w2, state.v.adapter_w2,
              grads.adapter_w2, lr, c1, c2, adam);
  adam_update(params.adapter_b2, state.m.adapter_b2, state.v.adapter_b2,
              grads.adapter_b2, lr, c1, c2, adam);
  adam_update(params.attn_w, state.m.attn_w, state.v.attn_w, grads.attn_w, lr,
              c1, c2, adam);
  adam_update(params.vis_w, state.m.vis_w, state.v.vis_w, grads.vis_w, lr, c1,
              c2, adam);
}

void TrainConfig::validate() const {
  if (batch_size <= 0) throw std::invalid_argument("batch_size must be positive");
  if (learning_rate < 0.0) throw std::invalid_argument("learning_rate must be >= 0");
  if (max_epochs < 0) throw std::invalid_argument("max_epochs must be >= 0");
  if (n_neg <= 0) throw std::invalid_argument("n_neg must be positive");
  if (d_hidden <= 0) throw std::invalid_argument("d_hidden must be positive");
  if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
  if (hyper.alpha < 0.0) throw std::invalid_argument("alpha must be >= 0");
  if (hyper.mu < 0.0) throw std::invalid_argument("mu must be >= 0");
}

namespace {

std::vector<std::string> label_vocabulary(const std::vector<LabeledExample>& source,
                                          const WordSpace& ws) {
  std::set<std::string> vocab;
  for (const auto& ex : source) {
    if (ex.labels.empty()) {
      throw std::invalid_argument("train: source example without labels");
    }
    for (const auto& l : ex.labels) vocab.insert(l);
  }
  for (const auto& word : vocab) {
    if (!ws.contains(word)) {
      throw std::invalid_argument("train: label '" + word + "' has no prototype");
    }
  }
  return {vocab.begin(), vocab.end()};
}

std::vector<std::vector<std::string>> sample_negatives(
    const std::vector<std::string>& vocab, const LabeledExample& ex, int n_neg,
    SplitMix64& rng) {
  std::unordered_set<std::string> pos(ex.labels.begin(), ex.labels.end());
  std::vector<std::vector<std::string>> out;
  out.reserve(ex.labels.size());
  const size_t available = vocab.size() - std::min(vocab.size(), pos.size());
  for (size_t i = 0; i < ex.labels.size(); ++i) {
    std::vector<std::string> negs;
    if (available <= size_t(n_neg)) {
      for (const auto& w : vocab) {
        if (!pos.count(w)) negs.push_back(w);
      }
    } else {
      std::unordered_set<std::string> chosen;
      while (negs.size() < size_t(n_neg)) {
        const std::string& w = vocab[rng.next_below(vocab.size())];
        if (pos.count(w) || chosen.count(w)) continue;
        chosen.insert(w);
        negs.push_back(w);
      }
    }
    out.push_back(std::move(negs));
  }
  return out;
}

}  // namespace

TrainResult train(const TrainConfig& config, const WordSpace& ws,
                  const TopicList& topics,
                  const std::vector<LabeledExample>& source,
                  const std::vector<Vec>& target_pool,
                  const std::vector<VideoRecord>& valid) {
  config.validate();
  if (source.empty()) throw std::invalid_argument("train: empty source corpus");
  if (config.hyper.mu > 0.0 && target_pool.empty()) {
    throw std::invalid_argument("train: mu > 0 requires target features");
  }
  const std::vector<std::string> vocab = label_vocabulary(source, ws);

  ModelDims dims;
  dims.d_raw = int(source[0].x.size());
  dims.d_hidden = config.d_hidden;
  dims.d_feat = config.d_feat > 0 ? config.d_feat : dims.d_raw;
  dims.d_sem = ws.dim();
  dims.validate();

  TrainResult result;
  result.params = init_params(dims, derive_seed(config.seed, kStreamInit));
  if (config.max_epochs == 0) return result;

  TopicList topics_usable = filter_topics(topics, ws);
  AdamState state = AdamState::zeros(dims);
  ModelParams best_params = result.params;
  double best_acc = -1.0;
  int best_epoch = 0;
  size_t target_cursor = 0;
  long long global_step = 0;

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    auto t0 = std::chrono::steady_clock::now();
    std::vector<size_t> order(source.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    SplitMix64 shuffle_rng(derive_seed(config.seed, kStreamShuffleBase + uint64_t(epoch)));
    shuffle(order, shuffle_rng);

    LossBreakdown epoch_loss;
    int steps = 0;
    for (size_t start = 0; start < order.size(); start += size_t(config.batch_size)) {
      size_t end = std::min(order.size(), start + size_t(config.batch_size));
      TrainBatch batch;
      SplitMix64 neg_rng(derive_seed(config.seed, kStreamNegativesBase + uint64_t(global_step)));
      for (size_t i = start; i < end; ++i) {
        const LabeledExample& ex = source[order[i]];
        SourceExample se;
        se.x = ex.x;
        se.positives = ex.labels;
        se.negatives = sample_negatives(vocab, ex, config.n_neg, neg_rng);
        batch.source.push_back(std::move(se));
      }
      KernelBank bank{{1.0}, {1.0}};
      if (config.hyper.mu > 0.0) {
        std::vector<Vec> combined;
        combined.reserve(2 * batch.source.size());
        for (const auto& se : batch.source) combined.push_back(se.x);
        for (size_t i = 0; i < batch.source.size(); ++i) {
          batch.target.push_back(target_pool[(target_cursor + i) % target_pool.size()]);
          combined.push_back(batch.target.back());
        }
        target_cursor = (target_cursor + batch.source.size()) % target_pool.size();
        bank = median_heuristic_bank(combined);
      }
      Gradients grads = Gradients::zeros(dims);
      LossBreakdown lb = total_loss_with_gradients(result.params, ws, batch,
                                                   bank, config.hyper, &grads);
      adam_step(result.params, grads, state, config.learning_rate, config.adam);
      epoch_loss.hinge += lb.hinge;
      epoch_loss.reg_v += lb.reg_v;
      epoch_loss.reg_a += lb.reg_a;
      epoch_loss.mmd += lb.mmd;
      epoch_loss.total += lb.total;
      ++steps;
      ++global_step;
    }
    epoch_loss.hinge /= steps;
    epoch_loss.reg_v /= steps;
    epoch_loss.reg_a /= steps;
    epoch_loss.mmd /= steps;
    epoch_loss.total /= steps;

    double val_acc = 0.0;
    if (!valid.empty()) {
      val_acc = evaluate(result.params, ws, topics_usable, valid, config.lambda,
                         config.raw_counts)
                    .accuracy;
    }
    double seconds = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
    result.history.rows.push_back({epoch, epoch_loss, val_acc, seconds});
    if (val_acc > best_acc) {
      best_acc = val_acc;
      best_epoch = epoch;
      best_params = result.params;
    }
  }
  result.params = std::move(best_params);
  result.best_epoch = best_epoch;
  return result;
}

std::string history_csv(const TrainHistory& history) {
  std::string out = "epoch,hinge,reg_v,reg_a,mmd,total,val_acc,seconds\n";
  for (const auto& row : history.rows) {
    char sec[32];
    std::snprintf(sec, sizeof(sec), "%.3f", row.seconds);
    out += std::to_string(row.epoch);
    out += ',';
    out += fmt_double(row.loss.hinge);
    out += ',';
    out += fmt_double(row.loss.reg_v);
    out += ',';
    out += fmt_double(row.loss.reg_a);
    out += ',';
    out += fmt_double(row.loss.mmd);
    out += ',';
    out += fmt_double(row.loss.total);
    out += ',';
    out += fmt_double(row.val_acc);
    out += ',';
    out += sec;
    out += '\n';
  }
  return out;
}

namespace {

struct TrainKey {
  int batch_size;
  double lr;
  double alpha;
};

std::vector<double> midpoints(const std::vector<double>& axis, double winner,
                              bool geometric) {
  std::vector<double> sorted = axis;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  auto it = std::find(sorted.begin(), sorted.end(), winner);
  std::vector<double> mids;
  if (it == sorted.end() || sorted.size() < 2) return mids;
  auto mid = [&](double a, double b) {
    return (geometric && a > 0.0 && b > 0.0) ? std::sqrt(a * b) : 0.5 * (a + b);
  };
  if (it != sorted.begin()) mids.push_back(mid(*(it - 1), *it));
  if (it + 1 != sorted.end()) mids.push_back(mid(*it, *(it + 1)));
  return mids;
}

}  // namespace

GridResult grid_search(const GridAxes& axes, const TrainConfig& base, int folds,
                       const WordSpace& ws, const TopicList& topics,
                       const std::vector<LabeledExample>& source,
                       const std::vector<VideoRecord>& videos) {
  if (folds < 2) throw std::invalid_argument("grid_search: folds must be >= 2");
  if (videos.size() < size_t(folds)) {
    throw std::invalid_argument("grid_search: fewer videos than folds");
  }
  std::vector<int> batch_axis = axes.batch_sizes.empty()
                                    ? std::vector<int>{base.batch_size}
                                    : axes.batch_sizes;
  std::vector<double> lr_axis = axes.learning_rates.empty()
                                    ? std::vector<double>{base.learning_rate}
                                    : axes.learning_rates;
  std::vector<double> alpha_axis =
      axes.alphas.empty() ? std::vector<double>{base.hyper.alpha} : axes.alphas;
  std::vector<double> lambda_axis =
      axes.lambdas.empty() ? std::vector<double>{base.lambda} : axes.lambdas;

  // Deterministic fold assignment by shuffled video index.
  std::vector<size_t> perm(videos.size());
  for (size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  SplitMix64 fold_rng(derive_seed(base.seed, kStreamFolds));
  shuffle(perm, fold_rng);
  std::vector<std::vector<size_t>> fold_members(folds);
  for (size_t pos = 0; pos < perm.size(); ++pos) {
    fold_members[pos % folds].push_back(perm[pos]);
  }

  TopicList topics_usable = filter_topics(topics, ws);
  GridResult result;
  result.best = base;
  result.best_accuracy = -1.0;
  uint64_t train_counter = 0;

  auto run_key = [&](const TrainKey& key, bool refined) {
    // One training per fold, shared across the lambda axis.
    std::vector<std::vector<double>> acc_per_lambda(lambda_axis.size());
    for (int f = 0; f < folds; ++f) {
      std::vector<VideoRecord> holdout;
      std::vector<Vec> pool;
      std::vector<bool> held(videos.size(), false);
      for (size_t idx : fold_members[f]) held[idx] = true;
      for (size_t i = 0; i < videos.size(); ++i) {
        if (held[i]) {
          holdout.push_back(videos[i]);
        } else {
          for (const auto& c : videos[i].candidates) pool.push_back(c.feature);
        }
      }
      TrainConfig cfg = base;
      cfg.batch_size = key.batch_size;
      cfg.learning_rate = key.lr;
      cfg.hyper.alpha = key.alpha;
      cfg.seed = derive_seed(base.seed, kStreamGridBase + train_counter);
      TrainResult trained = train(cfg, ws, topics, source, pool, holdout);
      for (size_t li = 0; li < lambda_axis.size(); ++li) {
        double acc = evaluate(trained.params, ws, topics_usable, holdout,
                              lambda_axis[li], base.raw_counts)
                         .accuracy;
        acc_per_lambda[li].push_back(acc);
      }
      ++train_counter;
    }
    for (size_t li = 0; li < lambda_axis.size(); ++li) {
      GridCell cell;
      cell.config = base;
      cell.config.batch_size = key.batch_size;
      cell.config.learning_rate = key.lr;
      cell.config.hyper.alpha = key.alpha;
      cell.config.lambda = lambda_axis[li];
      cell.fold_accuracies = acc_per_lambda[li];
      double sum = 0.0;
      for (double a : cell.fold_accuracies) sum += a;
      cell.mean_accuracy = sum / double(folds);
      cell.refined = refined;
      if (cell.mean_accuracy > result.best_accuracy) {
        result.best_accuracy = cell.mean_accuracy;
        result.best = cell.config;
      }
      result.table.push_back(std::move(cell));
    }
  };

  for (int bs : batch_axis) {
    for (double lr : lr_axis) {
      for (double alpha : alpha_axis) {
        run_key({bs, lr, alpha}, false);
      }
    }
  }

  // One refinement pass: re-grid each axis around the winner at half
  // resolution, holding the other winning coordinates fixed.
  const TrainConfig winner = result.best;
  std::vector<double> batch_axis_d(batch_axis.begin(), batch_axis.end());
  for (double b : midpoints(batch_axis_d, double(winner.batch_size), false)) {
    run_key({int(std::lround(b)), winner.learning_rate, winner.hyper.alpha}, true);
  }
  for (double lr : midpoints(lr_axis, winner.learning_rate, true)) {
    run_key({winner.batch_size, lr, winner.hyper.alpha}, true);
  }
  for (double a : midpoints(alpha_axis, winner.hyper.alpha, false)) {
    run_key({winner.batch_size, winner.learning_rate, a}, true);
  }
  if (lambda_axis.size() >= 2) {
    std::vector<double> extra = midpoints(lambda_axis, result.best.lambda, false);
    if (!extra.empty()) {
      std::vector<double> saved = lambda_axis;
      lambda_axis = extra;
      run_key({winner.batch_size, winner.learning_rate, winner.hyper.alpha}, true);
      lambda_axis = saved;
    }
  }
  return result;
}

}  // namespace amuse
