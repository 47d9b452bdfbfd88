#include "amuse/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "amuse/oracle.hpp"
#include "amuse/rng.hpp"
#include "amuse/selector.hpp"

namespace amuse {

bool CheckReport::all_pass() const {
  return std::all_of(rows.begin(), rows.end(),
                     [](const CheckRow& r) { return r.pass; });
}

std::string CheckReport::table() const {
  std::string out;
  for (const auto& r : rows) {
    out += r.pass ? "[PASS] " : "[FAIL] ";
    out += r.name;
    if (!r.detail.empty()) {
      out += "  (";
      out += r.detail;
      out += ")";
    }
    out += '\n';
  }
  return out;
}

void CheckReport::merge(const CheckReport& other) {
  rows.insert(rows.end(), other.rows.begin(), other.rows.end());
}

namespace {

struct TensorRef {
  const char* name;
  double* data;
  Eigen::Index size;
};

std::vector<TensorRef> tensor_refs(ModelParams& p) {
  return {
      {"adapter_w1", p.adapter_w1.data(), p.adapter_w1.size()},
      {"adapter_b1", p.adapter_b1.data(), p.adapter_b1.size()},
      {"adapter_w2", p.adapter_w2.data(), p.adapter_w2.size()},
      {"adapter_b2", p.adapter_b2.data(), p.adapter_b2.size()},
      {"attn_w", p.attn_w.data(), p.attn_w.size()},
      {"vis_w", p.vis_w.data(), p.vis_w.size()},
  };
}

std::vector<TensorRef> tensor_refs(Gradients& g) {
  return {
      {"adapter_w1", g.adapter_w1.data(), g.adapter_w1.size()},
      {"adapter_b1", g.adapter_b1.data(), g.adapter_b1.size()},
      {"adapter_w2", g.adapter_w2.data(), g.adapter_w2.size()},
      {"adapter_b2", g.adapter_b2.data(), g.adapter_b2.size()},
      {"attn_w", g.attn_w.data(), g.attn_w.size()},
      {"vis_w", g.vis_w.data(), g.vis_w.size()},
  };
}

Vec random_vec(int dim, SplitMix64& rng) {
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v[i] = rng.normal();
  return v;
}

Vec random_unit(int dim, SplitMix64& rng) {
  Vec v = random_vec(dim, rng);
  double n = v.norm();
  return n > 0.0 ? Vec(v / n) : Vec(Vec::Unit(dim, 0));
}

struct GradSetting {
  ModelParams params;
  WordSpace ws;
  TrainBatch batch;
  KernelBank bank;
  Hyper hyper;
};

GradSetting random_grad_setting(uint64_t seed, bool attend_negatives) {
  SplitMix64 rng(seed);
  GradSetting s;
  ModelDims dims;
  dims.d_raw = 5 + int(rng.next_below(6));
  dims.d_hidden = 6 + int(rng.next_below(6));
  dims.d_feat = 4 + int(rng.next_below(5));
  dims.d_sem = 4 + int(rng.next_below(5));
  s.params = init_params(dims, rng.next_u64());

  std::vector<std::string> vocab;
  for (int i = 0; i < 8; ++i) {
    vocab.push_back("w" + std::to_string(i));
    s.ws.insert(vocab.back(), random_unit(dims.d_sem, rng));
  }

  std::vector<Vec> combined;
  for (int e = 0; e < 2; ++e) {
    SourceExample ex;
    ex.x = random_vec(dims.d_raw, rng);
    combined.push_back(ex.x);
    int n_pos = 1 + int(rng.next_below(2));
    std::vector<std::string> pool = vocab;
    SplitMix64 pool_rng(rng.next_u64());
    shuffle(pool, pool_rng);
    for (int i = 0; i < n_pos; ++i) {
      ex.positives.push_back(pool[size_t(i)]);
      ex.negatives.push_back({pool[size_t(n_pos + 2 * i)], pool[size_t(n_pos + 2 * i + 1)]});
    }
    s.batch.source.push_back(std::move(ex));
  }
  for (int t = 0; t < 3; ++t) {
    s.batch.target.push_back(random_vec(dims.d_raw, rng));
    combined.push_back(s.batch.target.back());
  }
  s.bank = median_heuristic_bank(combined);
  s.hyper.alpha = 0.5;
  s.hyper.eta = 1e-3;
  s.hyper.gamma = 1e-3;
  s.hyper.mu = 0.3;
  s.hyper.attend_negatives = attend_negatives;
  return s;
}

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6});
}

}  // namespace

CheckReport check_gradients(uint64_t seed, int n_seeds, int coords_per_tensor,
                            double h, double tol,
                            const std::string& sabotage_tensor) {
  struct TensorStat {
    double max_err = 0.0;
    int checked = 0;
    int skipped = 0;
  };
  std::vector<std::string> names = {"adapter_w1", "adapter_b1", "adapter_w2",
                                    "adapter_b2", "attn_w", "vis_w"};
  std::vector<TensorStat> stats(names.size());

  for (int si = 0; si < n_seeds; ++si) {
    GradSetting s = random_grad_setting(derive_seed(seed, uint64_t(si)), si % 2 == 1);
    Gradients analytic = gradients(s.params, s.ws, s.batch, s.bank, s.hyper);
    auto grad_refs = tensor_refs(analytic);
    auto param_refs = tensor_refs(s.params);
    SplitMix64 coord_rng(derive_seed(seed, 1000 + uint64_t(si)));

    for (size_t ti = 0; ti < param_refs.size(); ++ti) {
      double analytic_sign = (names[ti] == sabotage_tensor) ? -1.0 : 1.0;
      int done = 0;
      int attempts = 0;
      while (done < coords_per_tensor && attempts < coords_per_tensor * 20) {
        ++attempts;
        Eigen::Index idx =
            Eigen::Index(coord_rng.next_below(uint64_t(param_refs[ti].size)));
        double* slot = param_refs[ti].data + idx;
        const double saved = *slot;
        auto loss_at = [&](double value) {
          *slot = value;
          double total = total_loss(s.params, s.ws, s.batch, s.bank, s.hyper).total;
          *slot = saved;
          return total;
        };
        double fd = (loss_at(saved + h) - loss_at(saved - h)) / (2.0 * h);
        double fd_half = (loss_at(saved + h / 2) - loss_at(saved - h / 2)) / h;
        if (rel_err(fd, fd_half) > 1e-5) {
          // FD straddles a hinge/ReLU kink; it is not a valid reference here.
          ++stats[ti].skipped;
          continue;
        }
        double a = analytic_sign * grad_refs[ti].data[idx];
        stats[ti].max_err = std::max(stats[ti].max_err, rel_err(a, fd));
        ++done;
        ++stats[ti].checked;
      }
    }
  }

  CheckReport report;
  for (size_t ti = 0; ti < names.size(); ++ti) {
    CheckRow row;
    row.name = "gradient " + names[ti];
    row.pass = stats[ti].max_err <= tol &&
               stats[ti].checked >= coords_per_tensor * n_seeds;
    char detail[128];
    std::snprintf(detail, sizeof(detail),
                  "max rel err %.3e over %d coords, %d kink resamples",
                  stats[ti].max_err, stats[ti].checked, stats[ti].skipped);
    row.detail = detail;
    report.rows.push_back(std::move(row));
  }
  return report;
}

CheckReport check_mmd(uint64_t seed, int n_cases) {
  SplitMix64 rng(seed);
  double max_diff = 0.0;
  double max_self = 0.0;
  bool symmetric = true;
  for (int c = 0; c < n_cases; ++c) {
    int dim = 1 + int(rng.next_below(8));
    int n = 1 + int(rng.next_below(64));
    int m = 1 + int(rng.next_below(64));
    int n_kernels = 1 + int(rng.next_below(5));
    KernelBank bank;
    double sigma = 0.2 + rng.next_double();
    double beta_total = 0.0;
    std::vector<double> raw_betas;
    for (int u = 0; u < n_kernels; ++u) {
      bank.sigmas.push_back(sigma);
      sigma *= 1.3 + rng.next_double();
      raw_betas.push_back(0.1 + rng.next_double());
      beta_total += raw_betas.back();
    }
    for (double b : raw_betas) bank.betas.push_back(b / beta_total);
    double sum = 0.0;
    for (double b : bank.betas) sum += b;
    bank.betas.back() += 1.0 - sum;  // make the betas sum to exactly 1

    std::vector<Vec> a, b;
    std::vector<std::vector<double>> ar, br;
    for (int i = 0; i < n; ++i) {
      Vec v = random_vec(dim, rng);
      ar.emplace_back(v.data(), v.data() + v.size());
      a.push_back(std::move(v));
    }
    for (int i = 0; i < m; ++i) {
      Vec v = random_vec(dim, rng);
      br.emplace_back(v.data(), v.data() + v.size());
      b.push_back(std::move(v));
    }
    double fast = mk_mmd(a, b, bank);
    double slow = oracle::mmd(ar, br, bank.sigmas, bank.betas);
    max_diff = std::max(max_diff, std::abs(fast - slow));
    max_self = std::max(max_self, std::abs(mk_mmd(a, a, bank)));
    if (mk_mmd(a, b, bank) != mk_mmd(b, a, bank)) symmetric = false;
  }

  CheckReport report;
  char detail[96];
  std::snprintf(detail, sizeof(detail), "max |impl - oracle| %.3e over %d cases",
                max_diff, n_cases);
  report.rows.push_back({"mmd oracle equivalence", max_diff <= 1e-10, detail});
  std::snprintf(detail, sizeof(detail), "max |mmd(A,A)| %.3e", max_self);
  report.rows.push_back({"mmd self-distance zero", max_self <= 1e-12, detail});
  report.rows.push_back(
      {"mmd symmetry (bitwise)", symmetric, symmetric ? "exact" : "mismatch"});
  return report;
}

CheckReport check_popularity(uint64_t seed, int n_cases) {
  SplitMix64 rng(seed);
  double max_diff = 0.0;
  for (int c = 0; c < n_cases; ++c) {
    ModelDims dims;
    dims.d_raw = 3 + int(rng.next_below(10));
    dims.d_hidden = 4 + int(rng.next_below(10));
    dims.d_feat = 3 + int(rng.next_below(8));
    dims.d_sem = 3 + int(rng.next_below(8));
    ModelParams params = init_params(dims, rng.next_u64());

    WordSpace ws;
    int n_words = 2 + int(rng.next_below(10));
    TopicList topics;
    // Half the cases use a vocabulary disjoint from any training labels
    // (pure zero-shot lists); scoring must not care.
    const char* prefix = (c % 2 == 0) ? "seen_" : "zeroshot_";
    for (int i = 0; i < n_words; ++i) {
      std::string word = prefix + std::to_string(i);
      ws.insert(word, random_unit(dims.d_sem, rng));
      topics.items.push_back({word, 1 + (long long)rng.next_below(100), 0.0});
    }
    normalize_topic_weights(topics);

    Vec feature = random_vec(dims.d_raw, rng);
    bool raw_counts = (c % 3 == 0);
    double fast = popularity(params, ws, topics, feature, raw_counts);
    double slow = oracle::popularity(params, ws, topics, feature, raw_counts);
    max_diff = std::max(max_diff, std::abs(fast - slow));
  }
  CheckReport report;
  char detail[96];
  std::snprintf(detail, sizeof(detail), "max |impl - oracle| %.3e over %d cases",
                max_diff, n_cases);
  report.rows.push_back({"popularity oracle equivalence", max_diff <= 1e-10, detail});
  return report;
}

}  // namespace amuse
