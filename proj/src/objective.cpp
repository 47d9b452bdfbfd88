#include "amuse/objective.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace amuse {

void KernelBank::validate() const {
  if (sigmas.empty() || sigmas.size() != betas.size()) {
    throw std::invalid_argument("kernel bank: sigmas/betas must be nonempty and parallel");
  }
  double beta_sum = 0.0;
  for (double b : betas) {
    if (b < 0.0) throw std::invalid_argument("kernel bank: negative beta");
    beta_sum += b;
  }
  if (std::abs(beta_sum - 1.0) > 1e-12) {
    throw std::invalid_argument("kernel bank: betas must sum to 1");
  }
  double prev = 0.0;
  for (double s : sigmas) {
    if (s <= prev) {
      throw std::invalid_argument("kernel bank: sigmas must be positive and strictly increasing");
    }
    prev = s;
  }
}

KernelBank median_heuristic_bank(const std::vector<Vec>& combined, int m) {
  if (m < 1) throw std::invalid_argument("median_heuristic_bank: m must be >= 1");
  std::vector<double> dists;
  dists.reserve(combined.size() * (combined.size() - 1) / 2);
  for (size_t i = 0; i < combined.size(); ++i) {
    for (size_t j = i + 1; j < combined.size(); ++j) {
      dists.push_back((combined[i] - combined[j]).norm());
    }
  }
  double sigma0 = 1.0;
  if (!dists.empty()) {
    std::sort(dists.begin(), dists.end());
    size_t k = dists.size();
    double median = (k % 2 == 1) ? dists[k / 2]
                                 : 0.5 * (dists[k / 2 - 1] + dists[k / 2]);
    if (median > 0.0) sigma0 = median;
  }
  KernelBank bank;
  // Ladder centered on sigma0, factor-2 spacing, uniform coefficients.
  int lo = -(m - 1) / 2;
  for (int i = 0; i < m; ++i) {
    bank.sigmas.push_back(sigma0 * std::pow(2.0, lo + i));
    bank.betas.push_back(1.0 / m);
  }
  bank.validate();
  return bank;
}

double gaussian_kernel(const Vec& x, const Vec& y, double sigma) {
  if (sigma <= 0.0) throw std::invalid_argument("gaussian_kernel: sigma must be > 0");
  if (x.size() != y.size()) throw std::invalid_argument("gaussian_kernel: length mismatch");
  return std::exp(-(x - y).squaredNorm() / (2.0 * sigma * sigma));
}

namespace {

double bank_kernel(double sqdist, const KernelBank& bank) {
  double k = 0.0;
  for (size_t u = 0; u < bank.sigmas.size(); ++u) {
    k += bank.betas[u] * std::exp(-sqdist / (2.0 * bank.sigmas[u] * bank.sigmas[u]));
  }
  return k;
}

// d/d(x) of the bank kernel is -w(x,y) * (x - y) with this weight.
double bank_kernel_weight(double sqdist, const KernelBank& bank) {
  double w = 0.0;
  for (size_t u = 0; u < bank.sigmas.size(); ++u) {
    double s2 = bank.sigmas[u] * bank.sigmas[u];
    w += bank.betas[u] / s2 * std::exp(-sqdist / (2.0 * s2));
  }
  return w;
}

// Lexicographic order on (size, elementwise values); used to make mk_mmd
// evaluate both argument orders through the identical sum sequence.
bool lists_ordered(const std::vector<Vec>& a, const std::vector<Vec>& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (size_t i = 0; i < a.size(); ++i) {
    for (Eigen::Index k = 0; k < a[i].size(); ++k) {
      if (a[i][k] != b[i][k]) return a[i][k] < b[i][k];
    }
  }
  return true;
}

}  // namespace

double mk_mmd(const std::vector<Vec>& source, const std::vector<Vec>& target,
              const KernelBank& bank) {
  if (source.empty() || target.empty()) {
    throw std::invalid_argument("mk_mmd: sample sets must be nonempty");
  }
  bank.validate();
  const std::vector<Vec>* a = &source;
  const std::vector<Vec>* b = &target;
  if (!lists_ordered(*a, *b)) std::swap(a, b);
  const Eigen::Index dim = (*a)[0].size();
  for (const auto& v : *a) {
    if (v.size() != dim) throw std::invalid_argument("mk_mmd: dimension mismatch");
  }
  for (const auto& v : *b) {
    if (v.size() != dim) throw std::invalid_argument("mk_mmd: dimension mismatch");
  }

  const size_t n = a->size(), m = b->size();
  double s_aa = 0.0, s_bb = 0.0, s_ab = 0.0;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      s_aa += bank_kernel(((*a)[i] - (*a)[j]).squaredNorm(), bank);
    }
  }
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = 0; j < m; ++j) {
      s_bb += bank_kernel(((*b)[i] - (*b)[j]).squaredNorm(), bank);
    }
  }
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < m; ++j) {
      s_ab += bank_kernel(((*a)[i] - (*b)[j]).squaredNorm(), bank);
    }
  }
  return s_aa / double(n * n) + s_bb / double(m * m) - 2.0 * s_ab / double(n * m);
}

namespace {

class ProtoCache {
 public:
  explicit ProtoCache(const WordSpace& ws) : ws_(ws) {}
  const Vec& get(const std::string& word) {
    auto it = cache_.find(word);
    if (it != cache_.end()) return it->second;
    auto p = ws_.prototype(word);
    if (!p) throw std::invalid_argument("no prototype for word: " + word);
    return cache_.emplace(word, std::move(*p)).first->second;
  }

 private:
  const WordSpace& ws_;
  std::unordered_map<std::string, Vec> cache_;
};

void check_disjoint(const std::vector<std::string>& positives,
                    const std::vector<std::string>& negatives) {
  std::unordered_set<std::string> pos(positives.begin(), positives.end());
  for (const auto& j : negatives) {
    if (pos.count(j)) {
      throw std::invalid_argument("hinge_rank_loss: word in both positives and negatives: " + j);
    }
  }
}

}  // namespace

double hinge_rank_loss(const ModelParams& params, const WordSpace& ws,
                       ForwardTrace& trace,
                       const std::vector<std::string>& positives,
                       const std::vector<std::string>& negatives,
                       double alpha, double eta, bool attend_negatives) {
  if (positives.empty()) {
    throw std::invalid_argument("hinge_rank_loss: positives must be nonempty");
  }
  check_disjoint(positives, negatives);
  ProtoCache protos(ws);

  double acc = 0.0;
  for (const auto& w : positives) {
    const Vec& s_w = protos.get(w);
    Vec a_w = semantic_attention(params, s_w);
    Vec vhat_w = attend(a_w, trace.feature);
    Vec z_w = params.vis_w * vhat_w;
    double p_w = s_w.dot(z_w);
    trace.words.push_back(w);
    trace.attention.push_back(a_w);
    trace.attended.push_back(vhat_w);
    trace.scores.push_back(p_w);

    for (const auto& j : negatives) {
      const Vec& s_j = protos.get(j);
      double p_j;
      if (attend_negatives) {
        Vec a_j = semantic_attention(params, s_j);
        Vec vhat_j = attend(a_j, trace.feature);
        p_j = s_j.dot(params.vis_w * vhat_j);
      } else {
        p_j = s_j.dot(z_w);
      }
      acc += std::max(0.0, alpha - p_w + p_j);
    }
  }
  return acc + eta * params.vis_w.squaredNorm();
}

Gradients Gradients::zeros(const ModelDims& dims) {
  Gradients g;
  g.adapter_w1 = Mat::Zero(dims.d_hidden, dims.d_raw);
  g.adapter_b1 = Vec::Zero(dims.d_hidden);
  g.adapter_w2 = Mat::Zero(dims.d_feat, dims.d_hidden);
  g.adapter_b2 = Vec::Zero(dims.d_feat);
  g.attn_w = Mat::Zero(dims.d_feat, dims.d_sem);
  g.vis_w = Mat::Zero(dims.d_sem, dims.d_feat);
  return g;
}

namespace {

// V-statistic MMD with per-sample gradients (d delta^2 / d sample).
double mmd_with_grads(const std::vector<Vec>& S, const std::vector<Vec>& T,
                      const KernelBank& bank, std::vector<Vec>* gS,
                      std::vector<Vec>* gT) {
  const size_t n = S.size(), m = T.size();
  const Eigen::Index dim = S[0].size();
  gS->assign(n, Vec::Zero(dim));
  gT->assign(m, Vec::Zero(dim));

  double s_ss = double(n);  // diagonal k(x,x) = 1 terms
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      Vec diff = S[i] - S[j];
      double d2 = diff.squaredNorm();
      s_ss += 2.0 * bank_kernel(d2, bank);
      Vec wd = bank_kernel_weight(d2, bank) * diff;
      // d/dS_i of (2/n^2) k(S_i, S_j) = -(2/n^2) w diff
      (*gS)[i] -= (2.0 / double(n * n)) * wd;
      (*gS)[j] += (2.0 / double(n * n)) * wd;
    }
  }
  double s_tt = double(m);
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = i + 1; j < m; ++j) {
      Vec diff = T[i] - T[j];
      double d2 = diff.squaredNorm();
      s_tt += 2.0 * bank_kernel(d2, bank);
      Vec wd = bank_kernel_weight(d2, bank) * diff;
      (*gT)[i] -= (2.0 / double(m * m)) * wd;
      (*gT)[j] += (2.0 / double(m * m)) * wd;
    }
  }
  double s_st = 0.0;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < m; ++j) {
      Vec diff = S[i] - T[j];
      double d2 = diff.squaredNorm();
      s_st += bank_kernel(d2, bank);
      Vec wd = bank_kernel_weight(d2, bank) * diff;
      // cross term enters with coefficient -2/(nm)
      (*gS)[i] += (2.0 / double(n * m)) * wd;
      (*gT)[j] -= (2.0 / double(n * m)) * wd;
    }
  }
  return s_ss / double(n * n) + s_tt / double(m * m) - 2.0 * s_st / double(n * m);
}

struct WordSlot {
  const Vec* proto = nullptr;
  Vec attention;   // a = relu(attn_w s)
  Vec attended;    // a ⊙ v
  Vec projected;   // vis_w (a ⊙ v)
  double coeff = 0.0;  // accumulated d(hinge)/d(score of this word's slot)
};

LossBreakdown loss_and_grads(const ModelParams& params, const WordSpace& ws,
                             const TrainBatch& batch, const KernelBank& bank,
                             const Hyper& hyper, Gradients* grads) {
  if (batch.source.empty()) {
    throw std::invalid_argument("total_loss: source batch must be nonempty");
  }
  if (hyper.mu > 0.0 && batch.target.empty()) {
    throw std::invalid_argument("total_loss: mu > 0 requires a target batch");
  }
  bank.validate();
  ProtoCache protos(ws);

  const size_t n_src = batch.source.size();
  const double inv_b = 1.0 / double(n_src);
  const bool want_grads = grads != nullptr;
  if (want_grads) *grads = Gradients::zeros(params.dims);

  std::vector<Vec> h_src, v_src, gv_hinge;
  h_src.reserve(n_src);
  v_src.reserve(n_src);
  if (want_grads) gv_hinge.assign(n_src, Vec::Zero(params.dims.d_feat));

  double hinge_sum = 0.0;
  for (size_t e = 0; e < n_src; ++e) {
    const SourceExample& ex = batch.source[e];
    if (ex.positives.empty()) {
      throw std::invalid_argument("total_loss: source example has no positive words");
    }
    if (ex.negatives.size() != ex.positives.size()) {
      throw std::invalid_argument("total_loss: negatives must parallel positives");
    }
    ForwardTrace trace = adapt(params, ex.x);
    const Vec& v = trace.feature;

    // One slot per distinct word of this example; coeff collects how many
    // active hinge terms touch the word's own attended projection.
    std::unordered_map<std::string, WordSlot> slots;
    auto slot_of = [&](const std::string& word) -> WordSlot& {
      auto it = slots.find(word);
      if (it != slots.end()) return it->second;
      WordSlot s;
      s.proto = &protos.get(word);
      s.attention = (params.attn_w * (*s.proto)).cwiseMax(0.0);
      s.attended = s.attention.cwiseProduct(v);
      s.projected = params.vis_w * s.attended;
      return slots.emplace(word, std::move(s)).first->second;
    };

    for (size_t i = 0; i < ex.positives.size(); ++i) {
      const std::string& w = ex.positives[i];
      check_disjoint({w}, ex.negatives[i]);
      WordSlot& pos = slot_of(w);
      const double p_w = pos.proto->dot(pos.projected);

      Vec s_active = Vec::Zero(params.dims.d_sem);
      int n_active = 0;
      for (const auto& jw : ex.negatives[i]) {
        WordSlot* neg = nullptr;
        const Vec* s_j = nullptr;
        double p_j;
        if (hyper.attend_negatives) {
          neg = &slot_of(jw);
          s_j = neg->proto;
          p_j = s_j->dot(neg->projected);
        } else {
          s_j = &protos.get(jw);
          p_j = s_j->dot(pos.projected);
        }
        const double margin = hyper.alpha - p_w + p_j;
        if (margin > 0.0) {
          hinge_sum += margin;
          if (want_grads) {
            if (hyper.attend_negatives) {
              pos.coeff -= 1.0;
              neg->coeff += 1.0;
            } else {
              s_active += *s_j;
              ++n_active;
            }
          }
        }
      }
      if (want_grads && !hyper.attend_negatives && n_active > 0) {
        // Both scores of each active pair share the attended vector of w.
        Vec dvec = s_active - double(n_active) * (*pos.proto);
        grads->vis_w.noalias() += inv_b * dvec * pos.attended.transpose();
        Vec g_vhat = inv_b * (params.vis_w.transpose() * dvec);
        Vec g_attn = g_vhat.cwiseProduct(v);
        for (Eigen::Index k = 0; k < g_attn.size(); ++k) {
          if (pos.attention[k] <= 0.0) g_attn[k] = 0.0;
        }
        grads->attn_w.noalias() += g_attn * pos.proto->transpose();
        gv_hinge[e] += g_vhat.cwiseProduct(pos.attention);
      }
    }
    if (want_grads && hyper.attend_negatives) {
      for (auto& [word, slot] : slots) {
        if (slot.coeff == 0.0) continue;
        const double c = inv_b * slot.coeff;
        grads->vis_w.noalias() += c * (*slot.proto) * slot.attended.transpose();
        Vec g_vhat = c * (params.vis_w.transpose() * (*slot.proto));
        Vec g_attn = g_vhat.cwiseProduct(v);
        for (Eigen::Index k = 0; k < g_attn.size(); ++k) {
          if (slot.attention[k] <= 0.0) g_attn[k] = 0.0;
        }
        grads->attn_w.noalias() += g_attn * slot.proto->transpose();
        gv_hinge[e] += g_vhat.cwiseProduct(slot.attention);
      }
    }

    h_src.push_back(std::move(trace.hidden));
    v_src.push_back(std::move(trace.feature));
  }

  LossBreakdown lb;
  lb.hinge = hinge_sum * inv_b;
  lb.reg_v = hyper.eta * params.vis_w.squaredNorm();
  lb.reg_a = hyper.gamma * params.attn_w.squaredNorm();

  std::vector<Vec> h_tgt, v_tgt;
  std::vector<Vec> gmh_s, gmv_s, gmh_t, gmv_t;
  if (hyper.mu > 0.0) {
    h_tgt.reserve(batch.target.size());
    v_tgt.reserve(batch.target.size());
    for (const Vec& x : batch.target) {
      ForwardTrace t = adapt(params, x);
      h_tgt.push_back(std::move(t.hidden));
      v_tgt.push_back(std::move(t.feature));
    }
    if (want_grads) {
      lb.mmd = mmd_with_grads(h_src, h_tgt, bank, &gmh_s, &gmh_t) +
               mmd_with_grads(v_src, v_tgt, bank, &gmv_s, &gmv_t);
    } else {
      lb.mmd = mk_mmd(h_src, h_tgt, bank) + mk_mmd(v_src, v_tgt, bank);
    }
  }
  lb.total = lb.hinge + lb.reg_v + lb.reg_a + hyper.mu * lb.mmd;

  if (!want_grads) return lb;

  // Backprop through the adapter for every sample that touched it.
  auto backprop_adapter = [&](const Vec& x, const Vec& hidden, Vec g_v,
                              const Vec* g_h_direct) {
    grads->adapter_w2.noalias() += g_v * hidden.transpose();
    grads->adapter_b2 += g_v;
    Vec g_h = params.adapter_w2.transpose() * g_v;
    if (g_h_direct) g_h += *g_h_direct;
    for (Eigen::Index k = 0; k < g_h.size(); ++k) {
      if (hidden[k] <= 0.0) g_h[k] = 0.0;
    }
    grads->adapter_w1.noalias() += g_h * x.transpose();
    grads->adapter_b1 += g_h;
  };

  for (size_t e = 0; e < n_src; ++e) {
    Vec g_v = gv_hinge[e];
    const Vec* g_h_direct = nullptr;
    Vec g_h_store;
    if (hyper.mu > 0.0) {
      g_v += hyper.mu * gmv_s[e];
      g_h_store = hyper.mu * gmh_s[e];
      g_h_direct = &g_h_store;
    }
    backprop_adapter(batch.source[e].x, h_src[e], std::move(g_v), g_h_direct);
  }
  if (hyper.mu > 0.0) {
    for (size_t j = 0; j < batch.target.size(); ++j) {
      Vec g_v = hyper.mu * gmv_t[j];
      Vec g_h = hyper.mu * gmh_t[j];
      backprop_adapter(batch.target[j], h_tgt[j], std::move(g_v), &g_h);
    }
  }

  grads->vis_w += 2.0 * hyper.eta * params.vis_w;
  grads->attn_w += 2.0 * hyper.gamma * params.attn_w;
  return lb;
}

}  // namespace

LossBreakdown total_loss(const ModelParams& params, const WordSpace& ws,
                         const TrainBatch& batch, const KernelBank& bank,
                         const Hyper& hyper) {
  return loss_and_grads(params, ws, batch, bank, hyper, nullptr);
}

Gradients gradients(const ModelParams& params, const WordSpace& ws,
                    const TrainBatch& batch, const KernelBank& bank,
                    const Hyper& hyper) {
  Gradients g = Gradients::zeros(params.dims);
  loss_and_grads(params, ws, batch, bank, hyper, &g);
  return g;
}

LossBreakdown total_loss_with_gradients(const ModelParams& params,
                                        const WordSpace& ws,
                                        const TrainBatch& batch,
                                        const KernelBank& bank,
                                        const Hyper& hyper, Gradients* grads) {
  return loss_and_grads(params, ws, batch, bank, hyper, grads);
}

}  // namespace amuse
