#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstring>

#include "amuse/wordspace.hpp"
#include "test_util.hpp"

using namespace amuse;
using testutil::TempDir;
using testutil::write_file;

TEST_CASE("load_word_vectors normalizes a 3-4-5 vector") {
  TempDir dir("ws_345");
  write_file(dir.file("v.txt"), "cat 3.0 4.0\n");
  WordSpace ws = load_word_vectors(dir.file("v.txt"));
  CHECK(ws.dim() == 2);
  auto p = ws.prototype("cat");
  REQUIRE(p.has_value());
  CHECK((*p)[0] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK((*p)[1] == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("ragged line is rejected with its line number") {
  TempDir dir("ws_ragged");
  write_file(dir.file("v.txt"), "a 1 0\nb 1 0 0\n");
  try {
    load_word_vectors(dir.file("v.txt"));
    FAIL("expected a parse error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find(":2") != std::string::npos);
  }
}

TEST_CASE("large file: dimension inferred, all norms unit") {
  TempDir dir("ws_large");
  const int n = 10000, d = 400;
  SplitMix64 rng(7);
  std::string content;
  content.reserve(size_t(n) * d * 10);
  for (int i = 0; i < n; ++i) {
    content += "tok" + std::to_string(i);
    for (int k = 0; k < d; ++k) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), " %.6f", rng.normal());
      content += buf;
    }
    content += '\n';
  }
  write_file(dir.file("big.txt"), content);
  WordSpace ws = load_word_vectors(dir.file("big.txt"));
  CHECK(ws.dim() == d);
  CHECK(ws.size() == size_t(n));
  double worst = 0.0;
  for (size_t i = 0; i < ws.size(); ++i) {
    const Vec& v = ws.vector_at(i);
    double sq = 0.0;  // recomputed without Eigen
    for (Eigen::Index k = 0; k < v.size(); ++k) sq += v[k] * v[k];
    worst = std::max(worst, std::abs(std::sqrt(sq) - 1.0));
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("bad vectors are rejected") {
  TempDir dir("ws_bad");
  write_file(dir.file("zero.txt"), "z 0 0 0\n");
  CHECK_THROWS(load_word_vectors(dir.file("zero.txt")));
  write_file(dir.file("dup.txt"), "a 1 0\na 0 1\n");
  CHECK_THROWS(load_word_vectors(dir.file("dup.txt")));
  write_file(dir.file("nan.txt"), "a nan 1\n");
  CHECK_THROWS(load_word_vectors(dir.file("nan.txt")));
  write_file(dir.file("empty.txt"), "");
  CHECK_THROWS(load_word_vectors(dir.file("empty.txt")));
  CHECK_THROWS(load_word_vectors(dir.file("missing.txt")));
}

TEST_CASE("prototype lookup: present, missing, pure") {
  TempDir dir("ws_proto");
  write_file(dir.file("v.txt"), "cat 3 4\ndog 1 0\n");
  WordSpace ws = load_word_vectors(dir.file("v.txt"));
  CHECK(!ws.prototype("zzz-unknown").has_value());
  Vec a = *ws.prototype("cat");
  Vec b = *ws.prototype("cat");
  CHECK(std::memcmp(a.data(), b.data(), sizeof(double) * a.size()) == 0);
}

TEST_CASE("round trip keeps vectors within 1e-9") {
  TempDir dir("ws_rt");
  SplitMix64 rng(3);
  std::string content;
  for (int i = 0; i < 50; ++i) {
    content += "w" + std::to_string(i);
    for (int k = 0; k < 20; ++k) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), " %.8f", rng.normal());
      content += buf;
    }
    content += '\n';
  }
  write_file(dir.file("a.txt"), content);
  WordSpace ws1 = load_word_vectors(dir.file("a.txt"));
  write_word_vectors(ws1, dir.file("b.txt"));
  WordSpace ws2 = load_word_vectors(dir.file("b.txt"));
  REQUIRE(ws1.size() == ws2.size());
  for (size_t i = 0; i < ws1.size(); ++i) {
    CHECK((ws1.vector_at(i) - ws2.vector_at(i)).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("topic list weights from the published example counts") {
  TempDir dir("topics");
  write_file(dir.file("t.tsv"), "Girl\t29211\nBaby\t15873\n");
  TopicList t = load_topic_list(dir.file("t.tsv"));
  REQUIRE(t.items.size() == 2);
  CHECK(t.items[0].weight == doctest::Approx(29211.0 / 45084.0).epsilon(1e-12));
  CHECK(t.items[1].weight == doctest::Approx(15873.0 / 45084.0).epsilon(1e-12));
  CHECK(t.items[0].word == "Girl");
}

TEST_CASE("single topic gets weight one") {
  TempDir dir("topics_one");
  write_file(dir.file("t.tsv"), "cake\t7\n");
  TopicList t = load_topic_list(dir.file("t.tsv"));
  REQUIRE(t.items.size() == 1);
  CHECK(t.items[0].weight == 1.0);
}

TEST_CASE("111 topics: weights sum to one") {
  TempDir dir("topics_111");
  SplitMix64 rng(11);
  std::string content;
  for (int i = 0; i < 111; ++i) {
    content += "word" + std::to_string(i) + "\t" +
               std::to_string(1 + rng.next_below(30000)) + "\n";
  }
  write_file(dir.file("t.tsv"), content);
  TopicList t = load_topic_list(dir.file("t.tsv"));
  CHECK(t.items.size() == 111);
  double sum = 0.0;
  for (const auto& it : t.items) sum += it.weight;
  CHECK(std::abs(sum - 1.0) <= 1e-9);
}

TEST_CASE("topic list error paths") {
  TempDir dir("topics_bad");
  write_file(dir.file("neg.tsv"), "a\t-3\n");
  CHECK_THROWS(load_topic_list(dir.file("neg.tsv")));
  write_file(dir.file("dup.tsv"), "a\t1\na\t2\n");
  CHECK_THROWS(load_topic_list(dir.file("dup.tsv")));
  write_file(dir.file("zero.tsv"), "a\t0\nb\t0\n");
  CHECK_THROWS(load_topic_list(dir.file("zero.tsv")));
  write_file(dir.file("nohdr.tsv"), "a 12\n");
  CHECK_THROWS(load_topic_list(dir.file("nohdr.tsv")));
}

TEST_CASE("weights are invariant under uniform count scaling") {
  TempDir dir("topics_scale");
  SplitMix64 rng(5);
  std::string base, scaled;
  for (int i = 0; i < 25; ++i) {
    long long c = 1 + (long long)rng.next_below(5000);
    base += "w" + std::to_string(i) + "\t" + std::to_string(c) + "\n";
    scaled += "w" + std::to_string(i) + "\t" + std::to_string(3 * c) + "\n";
  }
  write_file(dir.file("a.tsv"), base);
  write_file(dir.file("b.tsv"), scaled);
  TopicList ta = load_topic_list(dir.file("a.tsv"));
  TopicList tb = load_topic_list(dir.file("b.tsv"));
  for (size_t i = 0; i < ta.items.size(); ++i) {
    CHECK(std::abs(ta.items[i].weight - tb.items[i].weight) <= 1e-15);
  }
}

TEST_CASE("filter_topics drops words without vectors and renormalizes") {
  TempDir dir("topics_filter");
  write_file(dir.file("v.txt"), "a 1 0\nb 0 1\n");
  write_file(dir.file("t.tsv"), "a\t10\nmissing\t80\nb\t30\n");
  WordSpace ws = load_word_vectors(dir.file("v.txt"));
  TopicList t = filter_topics(load_topic_list(dir.file("t.tsv")), ws);
  REQUIRE(t.items.size() == 2);
  CHECK(t.items[0].word == "a");
  CHECK(t.items[1].word == "b");
  CHECK(t.items[0].weight == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(t.items[1].weight == doctest::Approx(0.75).epsilon(1e-12));
}
