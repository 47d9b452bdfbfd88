#include "amuse/oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace amuse::oracle {

namespace {

double kern(const std::vector<double>& x, const std::vector<double>& y,
            const std::vector<double>& sigmas, const std::vector<double>& betas) {
  double d2 = 0.0;
  for (size_t k = 0; k < x.size(); ++k) {
    double d = x[k] - y[k];
    d2 += d * d;
  }
  double out = 0.0;
  for (size_t u = 0; u < sigmas.size(); ++u) {
    out += betas[u] * std::exp(-d2 / (2.0 * sigmas[u] * sigmas[u]));
  }
  return out;
}

}  // namespace

double mmd(const std::vector<std::vector<double>>& source,
           const std::vector<std::vector<double>>& target,
           const std::vector<double>& sigmas, const std::vector<double>& betas) {
  if (source.empty() || target.empty()) {
    throw std::invalid_argument("oracle::mmd: empty sample set");
  }
  const size_t n = source.size();
  const size_t m = target.size();
  double ss = 0.0;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      ss += kern(source[i], source[j], sigmas, betas);
    }
  }
  double tt = 0.0;
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = 0; j < m; ++j) {
      tt += kern(target[i], target[j], sigmas, betas);
    }
  }
  double st = 0.0;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < m; ++j) {
      st += kern(source[i], target[j], sigmas, betas);
    }
  }
  return ss / double(n) / double(n) + tt / double(m) / double(m) -
         2.0 * st / double(n) / double(m);
}

double popularity(const ModelParams& params, const WordSpace& ws,
                  const TopicList& topics, const Vec& feature,
                  bool raw_counts) {
  const int d_raw = params.dims.d_raw;
  const int d_hidden = params.dims.d_hidden;
  const int d_feat = params.dims.d_feat;
  const int d_sem = params.dims.d_sem;
  if (feature.size() != d_raw) {
    throw std::invalid_argument("oracle::popularity: feature has wrong dimension");
  }
  if (topics.items.empty()) {
    throw std::invalid_argument("oracle::popularity: empty topic list");
  }

  std::vector<double> hidden(d_hidden, 0.0);
  for (int r = 0; r < d_hidden; ++r) {
    double acc = params.adapter_b1[r];
    for (int c = 0; c < d_raw; ++c) acc += params.adapter_w1(r, c) * feature[c];
    hidden[r] = acc > 0.0 ? acc : 0.0;
  }
  std::vector<double> v(d_feat, 0.0);
  for (int r = 0; r < d_feat; ++r) {
    double acc = params.adapter_b2[r];
    for (int c = 0; c < d_hidden; ++c) acc += params.adapter_w2(r, c) * hidden[c];
    v[r] = acc;
  }

  double total = 0.0;
  for (const auto& topic : topics.items) {
    auto proto = ws.prototype(topic.word);
    if (!proto) {
      throw std::invalid_argument("oracle::popularity: no prototype for " + topic.word);
    }
    std::vector<double> a(d_feat, 0.0);
    for (int r = 0; r < d_feat; ++r) {
      double acc = 0.0;
      for (int c = 0; c < d_sem; ++c) acc += params.attn_w(r, c) * (*proto)[c];
      a[r] = acc > 0.0 ? acc : 0.0;
    }
    std::vector<double> vhat(d_feat, 0.0);
    for (int r = 0; r < d_feat; ++r) vhat[r] = a[r] * v[r];
    double sc = 0.0;
    for (int r = 0; r < d_sem; ++r) {
      double acc = 0.0;
      for (int c = 0; c < d_feat; ++c) acc += params.vis_w(r, c) * vhat[c];
      sc += (*proto)[r] * acc;
    }
    total += (raw_counts ? double(topic.count) : topic.weight) * sc;
  }
  return total;
}

}  // namespace amuse::oracle
