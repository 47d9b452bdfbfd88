#include "amuse/frames.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace amuse {

void RawFrame::validate() const {
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("frame dimensions must be positive");
  }
  if (channels != 1 && channels != 3) {
    throw std::invalid_argument("frame must have 1 or 3 channels");
  }
  if (pixels.size() != size_t(width) * size_t(height) * size_t(channels)) {
    throw std::invalid_argument("pixel count does not match dimensions");
  }
}

namespace {

inline double luma_at(const RawFrame& f, int x, int y) {
  size_t idx = (size_t(y) * f.width + x) * f.channels;
  if (f.channels == 1) return double(f.pixels[idx]);
  return 0.299 * f.pixels[idx] + 0.587 * f.pixels[idx + 1] + 0.114 * f.pixels[idx + 2];
}

}  // namespace

double luma_mean(const RawFrame& frame) {
  frame.validate();
  double sum = 0.0;
  for (int y = 0; y < frame.height; ++y) {
    for (int x = 0; x < frame.width; ++x) sum += luma_at(frame, x, y);
  }
  return sum / (double(frame.width) * frame.height) / 255.0;
}

double laplacian_variance(const RawFrame& frame) {
  frame.validate();
  if (frame.width < 3 || frame.height < 3) {
    throw std::invalid_argument("laplacian_variance needs at least a 3x3 frame");
  }
  std::vector<double> responses;
  responses.reserve(size_t(frame.width - 2) * size_t(frame.height - 2));
  for (int y = 1; y + 1 < frame.height; ++y) {
    for (int x = 1; x + 1 < frame.width; ++x) {
      double r = luma_at(frame, x, y - 1) + luma_at(frame, x, y + 1) +
                 luma_at(frame, x - 1, y) + luma_at(frame, x + 1, y) -
                 4.0 * luma_at(frame, x, y);
      responses.push_back(r);
    }
  }
  double mean = 0.0;
  for (double r : responses) mean += r;
  mean /= double(responses.size());
  double var = 0.0;
  for (double r : responses) var += (r - mean) * (r - mean);
  return var / double(responses.size());
}

double histogram_entropy(const RawFrame& frame) {
  frame.validate();
  std::vector<double> bins(64, 0.0);
  for (int y = 0; y < frame.height; ++y) {
    for (int x = 0; x < frame.width; ++x) {
      int b = int(luma_at(frame, x, y) / 4.0);
      if (b > 63) b = 63;
      bins[b] += 1.0;
    }
  }
  const double total = double(frame.width) * frame.height;
  double h = 0.0;
  for (double c : bins) {
    if (c > 0.0) {
      double p = c / total;
      h -= p * std::log2(p);
    }
  }
  return h;
}

std::vector<int> quality_filter(const std::vector<RawFrame>& frames,
                                const QualityThresholds& thresholds) {
  std::vector<int> kept;
  for (size_t i = 0; i < frames.size(); ++i) {
    const RawFrame& f = frames[i];
    if (luma_mean(f) > thresholds.dark &&
        laplacian_variance(f) > thresholds.blur &&
        histogram_entropy(f) > thresholds.entropy) {
      kept.push_back(int(i));
    }
  }
  return kept;
}

namespace {

double cosine_distance(const Vec& a, const Vec& b) {
  double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) {
    throw std::invalid_argument("cosine distance undefined for zero vector");
  }
  return 1.0 - a.dot(b) / (na * nb);
}

}  // namespace

std::vector<std::vector<int>> leader_cluster(const std::vector<Vec>& features,
                                             double tau) {
  if (tau <= 0.0 || tau >= 2.0) {
    throw std::invalid_argument("leader_cluster: tau must be in (0, 2)");
  }
  std::vector<std::vector<int>> clusters;
  std::vector<int> leaders;  // founding feature index per cluster
  for (size_t i = 0; i < features.size(); ++i) {
    if (features[i].norm() == 0.0) {
      throw std::invalid_argument("leader_cluster: zero feature vector");
    }
    bool placed = false;
    for (size_t c = 0; c < clusters.size(); ++c) {
      if (cosine_distance(features[leaders[c]], features[i]) < tau) {
        clusters[c].push_back(int(i));
        placed = true;
        break;
      }
    }
    if (!placed) {
      leaders.push_back(int(i));
      clusters.push_back({int(i)});
    }
  }
  return clusters;
}

int medoid_index(const std::vector<Vec>& features, const std::vector<int>& members) {
  if (members.empty()) throw std::invalid_argument("medoid of empty cluster");
  int best = -1;
  double best_sum = 0.0;
  for (int m : members) {
    double sum = 0.0;
    for (int o : members) {
      if (o != m) sum += cosine_distance(features[m], features[o]);
    }
    if (best < 0 || sum < best_sum || (sum == best_sum && m < best)) {
      best = m;
      best_sum = sum;
    }
  }
  return best;
}

Vec frame_feature(const RawFrame& frame) {
  frame.validate();
  constexpr int kGrid = 8;
  Vec feat = Vec::Zero(kGrid * kGrid);
  Vec counts = Vec::Zero(kGrid * kGrid);
  for (int y = 0; y < frame.height; ++y) {
    int gy = y * kGrid / frame.height;
    for (int x = 0; x < frame.width; ++x) {
      int gx = x * kGrid / frame.width;
      feat[gy * kGrid + gx] += luma_at(frame, x, y);
      counts[gy * kGrid + gx] += 1.0;
    }
  }
  for (int i = 0; i < kGrid * kGrid; ++i) {
    if (counts[i] > 0.0) feat[i] /= counts[i];
  }
  feat.array() -= feat.mean();
  return feat;
}

std::vector<CandidateFrame> extract_candidates(const std::vector<RawFrame>& frames,
                                               const QualityThresholds& thresholds,
                                               double tau,
                                               const std::string& video_id) {
  std::vector<int> kept = quality_filter(frames, thresholds);
  if (kept.empty()) {
    throw std::runtime_error("no frame of video '" + video_id +
                             "' survived the quality filter");
  }
  std::vector<Vec> features;
  features.reserve(kept.size());
  for (int id : kept) features.push_back(frame_feature(frames[id]));

  std::vector<std::vector<int>> clusters = leader_cluster(features, tau);
  std::vector<CandidateFrame> candidates;
  candidates.reserve(clusters.size());
  for (const auto& members : clusters) {
    int local_medoid = medoid_index(features, members);
    CandidateFrame c;
    c.frame_id = kept[local_medoid];
    c.feature = features[local_medoid];
    c.cluster_size = int(members.size());
    c.representativeness = double(members.size()) / double(kept.size());
    candidates.push_back(std::move(c));
  }
  return candidates;
}

RawFrame read_pnm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open image: " + path);

  auto next_token = [&]() -> std::string {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
      if (c == '#') {
        while ((c = in.get()) != EOF && c != '\n') {
        }
        continue;
      }
      if (std::isspace(c)) {
        if (!tok.empty()) break;
        continue;
      }
      tok.push_back(char(c));
    }
    return tok;
  };

  std::string magic = next_token();
  int channels;
  if (magic == "P5") {
    channels = 1;
  } else if (magic == "P6") {
    channels = 3;
  } else {
    throw std::runtime_error(path + ": unsupported image format '" + magic + "'");
  }
  RawFrame f;
  f.channels = channels;
  f.width = std::stoi(next_token());
  f.height = std::stoi(next_token());
  int maxval = std::stoi(next_token());
  if (maxval != 255) {
    throw std::runtime_error(path + ": only maxval 255 is supported");
  }
  size_t count = size_t(f.width) * size_t(f.height) * size_t(channels);
  f.pixels.resize(count);
  in.read(reinterpret_cast<char*>(f.pixels.data()), std::streamsize(count));
  if (size_t(in.gcount()) != count) {
    throw std::runtime_error(path + ": truncated pixel data");
  }
  f.validate();
  return f;
}

void write_pnm(const RawFrame& frame, const std::string& path) {
  frame.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write image: " + path);
  out << (frame.channels == 1 ? "P5" : "P6") << "\n"
      << frame.width << " " << frame.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(frame.pixels.data()),
            std::streamsize(frame.pixels.size()));
}

}  // namespace amuse
