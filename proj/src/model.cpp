#include "amuse/model.hpp"

#include <cmath>
#include <stdexcept>

#include "amuse/rng.hpp"

namespace amuse {

void ModelDims::validate() const {
  if (d_raw <= 0 || d_hidden <= 0 || d_feat <= 0 || d_sem <= 0) {
    throw std::invalid_argument("model dimensions must be strictly positive");
  }
}

bool ModelParams::all_finite() const {
  return adapter_w1.allFinite() && adapter_b1.allFinite() &&
         adapter_w2.allFinite() && adapter_b2.allFinite() &&
         attn_w.allFinite() && vis_w.allFinite();
}

namespace {

void fill_xavier(Mat& w, SplitMix64& rng) {
  const double a = std::sqrt(6.0 / (static_cast<double>(w.rows()) +
                                    static_cast<double>(w.cols())));
  for (Eigen::Index r = 0; r < w.rows(); ++r) {
    for (Eigen::Index c = 0; c < w.cols(); ++c) {
      w(r, c) = rng.uniform(-a, a);
    }
  }
}

}  // namespace

ModelParams init_params(const ModelDims& dims, uint64_t seed) {
  dims.validate();
  ModelParams p;
  p.dims = dims;
  p.adapter_w1.resize(dims.d_hidden, dims.d_raw);
  p.adapter_b1 = Vec::Zero(dims.d_hidden);
  p.adapter_w2.resize(dims.d_feat, dims.d_hidden);
  p.adapter_b2 = Vec::Zero(dims.d_feat);
  p.attn_w.resize(dims.d_feat, dims.d_sem);
  p.vis_w.resize(dims.d_sem, dims.d_feat);

  SplitMix64 rng(seed);
  fill_xavier(p.adapter_w1, rng);
  fill_xavier(p.adapter_w2, rng);
  fill_xavier(p.attn_w, rng);
  fill_xavier(p.vis_w, rng);
  return p;
}

ForwardTrace adapt(const ModelParams& params, const Vec& x) {
  if (x.size() != params.dims.d_raw) {
    throw std::invalid_argument("adapt: input has wrong dimension");
  }
  ForwardTrace t;
  t.hidden = (params.adapter_w1 * x + params.adapter_b1).cwiseMax(0.0);
  t.feature = params.adapter_w2 * t.hidden + params.adapter_b2;
  return t;
}

Vec semantic_attention(const ModelParams& params, const Vec& s_w) {
  if (s_w.size() != params.dims.d_sem) {
    throw std::invalid_argument("semantic_attention: prototype has wrong dimension");
  }
  return (params.attn_w * s_w).cwiseMax(0.0);
}

Vec attend(const Vec& a_w, const Vec& v) {
  if (a_w.size() != v.size()) {
    throw std::invalid_argument("attend: length mismatch");
  }
  return a_w.cwiseProduct(v);
}

double score(const ModelParams& params, const Vec& s_w, const Vec& v_hat) {
  if (s_w.size() != params.dims.d_sem || v_hat.size() != params.dims.d_feat) {
    throw std::invalid_argument("score: shape mismatch");
  }
  return s_w.dot(params.vis_w * v_hat);
}

}  // namespace amuse
