#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstring>

#include "amuse/model.hpp"
#include "amuse/rng.hpp"
#include "test_util.hpp"

using namespace amuse;
using testutil::random_unit;
using testutil::random_vec;

namespace {

bool same_bits(const Mat& a, const Mat& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(), sizeof(double) * a.size()) == 0;
}

ModelDims small_dims() { return {6, 8, 5, 4}; }

}  // namespace

TEST_CASE("init is deterministic and biases are zero") {
  ModelParams a = init_params(small_dims(), 42);
  ModelParams b = init_params(small_dims(), 42);
  CHECK(same_bits(a.adapter_w1, b.adapter_w1));
  CHECK(same_bits(a.adapter_w2, b.adapter_w2));
  CHECK(same_bits(a.attn_w, b.attn_w));
  CHECK(same_bits(a.vis_w, b.vis_w));
  CHECK(a.adapter_b1.isZero(0.0));
  CHECK(a.adapter_b2.isZero(0.0));
  ModelParams c = init_params(small_dims(), 43);
  CHECK(!same_bits(a.attn_w, c.attn_w));
}

TEST_CASE("xavier variance matches uniform(-a,a) over many entries") {
  ModelDims dims{4, 4, 400, 250};  // attn_w gets 1e5 entries
  ModelParams p = init_params(dims, 9);
  const double expected = 2.0 / (400.0 + 250.0);  // a^2/3 with a^2 = 6/(m+n)
  double mean = p.attn_w.mean();
  double var = (p.attn_w.array() - mean).square().mean();
  CHECK(std::abs(var - expected) / expected <= 0.05);
}

TEST_CASE("adapt with zero weights returns the bias") {
  ModelParams p = init_params(small_dims(), 1);
  p.adapter_w1.setZero();
  p.adapter_w2.setZero();
  ForwardTrace t = adapt(p, Vec::Ones(6));
  CHECK(t.feature.isZero(0.0));  // b2 is zero
  CHECK(t.hidden.isZero(0.0));
}

TEST_CASE("hidden layer clamps negatives") {
  ModelDims dims{2, 2, 2, 2};
  ModelParams p = init_params(dims, 1);
  p.adapter_w1 = Mat::Identity(2, 2);
  Vec x(2);
  x << -1.0, 2.0;
  ForwardTrace t = adapt(p, x);
  CHECK(t.hidden[0] == 0.0);
  CHECK(t.hidden[1] == 2.0);
}

TEST_CASE("adapt matches a naive reimplementation") {
  SplitMix64 rng(77);
  for (int rep = 0; rep < 20; ++rep) {
    ModelDims dims{3 + int(rng.next_below(6)), 2 + int(rng.next_below(8)),
                   2 + int(rng.next_below(6)), 3};
    ModelParams p = init_params(dims, rng.next_u64());
    Vec x = random_vec(dims.d_raw, rng);
    ForwardTrace t = adapt(p, x);

    for (int r = 0; r < dims.d_hidden; ++r) {
      double acc = p.adapter_b1[r];
      for (int c = 0; c < dims.d_raw; ++c) acc += p.adapter_w1(r, c) * x[c];
      double h = acc > 0 ? acc : 0;
      CHECK(std::abs(h - t.hidden[r]) <= 1e-12);
    }
    for (int r = 0; r < dims.d_feat; ++r) {
      double acc = p.adapter_b2[r];
      for (int c = 0; c < dims.d_hidden; ++c) acc += p.adapter_w2(r, c) * t.hidden[c];
      CHECK(std::abs(acc - t.feature[r]) <= 1e-12);
    }
  }
}

TEST_CASE("adapt rejects wrong input length") {
  ModelParams p = init_params(small_dims(), 1);
  CHECK_THROWS(adapt(p, Vec::Ones(7)));
}

TEST_CASE("semantic attention basics") {
  ModelParams p = init_params(small_dims(), 2);
  CHECK(semantic_attention(p, Vec::Zero(4)).isZero(0.0));

  p.attn_w.setOnes();
  Vec s(4);
  s << 0.5, -0.1, 0.2, 0.1;  // component sum 0.7
  Vec a = semantic_attention(p, s);
  for (int i = 0; i < 5; ++i) CHECK(a[i] == doctest::Approx(0.7).epsilon(1e-12));

  Vec neg = -s;  // component sum -0.7 clamps to zero
  CHECK(semantic_attention(p, neg).isZero(0.0));
  CHECK_THROWS(semantic_attention(p, Vec::Ones(5)));
}

TEST_CASE("semantic attention matches brute force and is nonnegative") {
  SplitMix64 rng(5);
  for (int rep = 0; rep < 30; ++rep) {
    ModelDims dims{3, 3, 2 + int(rng.next_below(7)), 2 + int(rng.next_below(7))};
    ModelParams p = init_params(dims, rng.next_u64());
    Vec s = random_unit(dims.d_sem, rng);
    Vec a = semantic_attention(p, s);
    for (int r = 0; r < dims.d_feat; ++r) {
      double acc = 0;
      for (int c = 0; c < dims.d_sem; ++c) acc += p.attn_w(r, c) * s[c];
      CHECK(std::abs(std::max(0.0, acc) - a[r]) <= 1e-12);
      CHECK(a[r] >= 0.0);
    }
  }
}

TEST_CASE("attend gates elementwise") {
  Vec a(3), v(3);
  a << 2, 0, 1;
  v << 3, 5, -4;
  Vec out = attend(a, v);
  CHECK(out[0] == 6.0);
  CHECK(out[1] == 0.0);
  CHECK(out[2] == -4.0);
  CHECK(attend(Vec::Ones(3), v) == v);
  CHECK(attend(Vec::Zero(3), v).isZero(0.0));
  CHECK_THROWS(attend(Vec::Ones(2), v));
}

TEST_CASE("attend is linear in the feature") {
  SplitMix64 rng(6);
  for (int rep = 0; rep < 50; ++rep) {
    int d = 2 + int(rng.next_below(8));
    Vec a = random_vec(d, rng), v1 = random_vec(d, rng), v2 = random_vec(d, rng);
    double al = rng.uniform(-2, 2), be = rng.uniform(-2, 2);
    Vec lhs = attend(a, al * v1 + be * v2);
    Vec rhs = al * attend(a, v1) + be * attend(a, v2);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("score picks a coordinate under an identity transform") {
  ModelDims dims{2, 2, 2, 2};
  ModelParams p = init_params(dims, 3);
  p.vis_w = Mat::Identity(2, 2);
  Vec s(2), vhat(2);
  s << 1, 0;
  vhat << 0.3, 9.0;
  CHECK(score(p, s, vhat) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(score(p, s, Vec::Zero(2)) == 0.0);
}

TEST_CASE("score matches an independent triple product and is linear") {
  SplitMix64 rng(8);
  for (int rep = 0; rep < 30; ++rep) {
    ModelDims dims{3, 3, 2 + int(rng.next_below(6)), 2 + int(rng.next_below(6))};
    ModelParams p = init_params(dims, rng.next_u64());
    Vec s = random_vec(dims.d_sem, rng);
    Vec vhat = random_vec(dims.d_feat, rng);
    double acc = 0;
    for (int r = 0; r < dims.d_sem; ++r) {
      for (int c = 0; c < dims.d_feat; ++c) acc += s[r] * p.vis_w(r, c) * vhat[c];
    }
    CHECK(std::abs(acc - score(p, s, vhat)) <= 1e-12);
    double al = rng.uniform(-3, 3);
    CHECK(std::abs(score(p, s, Vec(al * vhat)) - al * score(p, s, vhat)) <= 1e-10);
  }
}

TEST_CASE("different attention vectors give different attended embeddings") {
  // One feature vector lands on distinct points for distinct words as long
  // as it has no zero component.
  SplitMix64 rng(13);
  int differing = 0;
  for (int rep = 0; rep < 40; ++rep) {
    ModelDims dims{4, 4, 5, 6};
    ModelParams p = init_params(dims, rng.next_u64());
    Vec v(5);
    for (int i = 0; i < 5; ++i) {
      double x = rng.normal();
      v[i] = x >= 0 ? x + 0.1 : x - 0.1;  // keep components away from zero
    }
    Vec a_w = semantic_attention(p, random_unit(6, rng));
    Vec a_j = semantic_attention(p, random_unit(6, rng));
    if ((a_w - a_j).cwiseAbs().maxCoeff() == 0.0) continue;
    CHECK((attend(a_w, v) - attend(a_j, v)).cwiseAbs().maxCoeff() > 0.0);
    ++differing;
  }
  CHECK(differing >= 35);
}
