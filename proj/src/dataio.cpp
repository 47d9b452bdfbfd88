#include "amuse/dataio.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace amuse {

std::string fmt_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_text_atomic(const std::string& path, const std::string& content) {
  std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out.write(content.data(), std::streamsize(content.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
  }
  std::filesystem::rename(tmp, target);
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for digest: " + path);
  uint64_t h = 0xcbf29ce484222325ull;
  char buf[8192];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= uint8_t(buf[i]);
      h *= 0x100000001b3ull;
    }
    if (in.eof()) break;
  }
  char out[17];
  std::snprintf(out, sizeof(out), "%016" PRIx64, h);
  return out;
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_double(const std::string& s, const std::string& where) {
  char* end = nullptr;
  double x = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') {
    throw std::runtime_error(where + ": cannot parse number '" + s + "'");
  }
  return x;
}

long parse_int(const std::string& s, const std::string& where) {
  char* end = nullptr;
  long x = std::strtol(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0') {
    throw std::runtime_error(where + ": cannot parse integer '" + s + "'");
  }
  return x;
}

}  // namespace

void write_feature_csv(const std::vector<FeatureRow>& rows, const std::string& path) {
  std::string out = "video_id,frame_id,label_set";
  Eigen::Index dim = rows.empty() ? 0 : rows[0].features.size();
  for (Eigen::Index i = 1; i <= dim; ++i) {
    out += ",f" + std::to_string(i);
  }
  out += '\n';
  for (const auto& r : rows) {
    if (r.features.size() != dim) {
      throw std::invalid_argument("feature csv: inconsistent feature dimension");
    }
    out += r.video_id;
    out += ',';
    out += std::to_string(r.frame_id);
    out += ',';
    for (size_t i = 0; i < r.labels.size(); ++i) {
      if (i) out += '|';
      out += r.labels[i];
    }
    for (Eigen::Index i = 0; i < dim; ++i) {
      out += ',';
      out += fmt_double(r.features[i]);
    }
    out += '\n';
  }
  write_text_atomic(path, out);
}

std::vector<FeatureRow> read_feature_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open feature csv: " + path);
  std::vector<FeatureRow> rows;
  std::string line;
  size_t line_no = 0;
  Eigen::Index dim = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split(line, ',');
    if (line_no == 1 && !fields.empty() && fields[0] == "video_id") continue;
    const std::string where = path + ":" + std::to_string(line_no);
    if (fields.size() < 4) {
      throw std::runtime_error(where + ": too few columns");
    }
    FeatureRow r;
    r.video_id = fields[0];
    r.frame_id = int(parse_int(fields[1], where));
    if (!fields[2].empty()) {
      r.labels = split(fields[2], '|');
    }
    Eigen::Index d = Eigen::Index(fields.size()) - 3;
    if (dim < 0) {
      dim = d;
    } else if (d != dim) {
      throw std::runtime_error(where + ": inconsistent feature dimension");
    }
    r.features.resize(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      r.features[i] = parse_double(fields[size_t(i) + 3], where);
    }
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw std::runtime_error("feature csv is empty: " + path);
  return rows;
}

void write_candidate_csv(const std::vector<CandidateRow>& rows, const std::string& path) {
  std::string out = "video_id,frame_id,cluster_size,representativeness\n";
  for (const auto& r : rows) {
    out += r.video_id;
    out += ',';
    out += std::to_string(r.frame_id);
    out += ',';
    out += std::to_string(r.cluster_size);
    out += ',';
    out += fmt_double(r.representativeness);
    out += '\n';
  }
  write_text_atomic(path, out);
}

std::vector<CandidateRow> read_candidate_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open candidate csv: " + path);
  std::vector<CandidateRow> rows;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split(line, ',');
    if (line_no == 1 && !fields.empty() && fields[0] == "video_id") continue;
    const std::string where = path + ":" + std::to_string(line_no);
    if (fields.size() != 4) {
      throw std::runtime_error(where + ": expected 4 columns");
    }
    CandidateRow r;
    r.video_id = fields[0];
    r.frame_id = int(parse_int(fields[1], where));
    r.cluster_size = int(parse_int(fields[2], where));
    r.representativeness = parse_double(fields[3], where);
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_truth_tsv(const std::vector<std::pair<std::string, int>>& truth,
                     const std::string& path) {
  std::string out;
  for (const auto& [vid, frame] : truth) {
    out += vid;
    out += '\t';
    out += std::to_string(frame);
    out += '\n';
  }
  write_text_atomic(path, out);
}

std::vector<std::pair<std::string, int>> read_truth_tsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open truth tsv: " + path);
  std::vector<std::pair<std::string, int>> truth;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto tab = line.find('\t');
    const std::string where = path + ":" + std::to_string(line_no);
    if (tab == std::string::npos) {
      throw std::runtime_error(where + ": expected 'video_id<TAB>frame_id'");
    }
    truth.emplace_back(line.substr(0, tab),
                       int(parse_int(line.substr(tab + 1), where)));
  }
  return truth;
}

std::vector<VideoRecord> assemble_videos(
    const std::vector<FeatureRow>& features,
    const std::vector<CandidateRow>& candidates,
    const std::vector<std::pair<std::string, int>>* truth) {
  // video_id -> frame_id -> feature
  std::unordered_map<std::string, std::unordered_map<int, const FeatureRow*>> feat_index;
  std::vector<std::string> order;
  for (const auto& f : features) {
    if (!feat_index.count(f.video_id)) order.push_back(f.video_id);
    auto& per_video = feat_index[f.video_id];
    if (!per_video.emplace(f.frame_id, &f).second) {
      throw std::runtime_error("duplicate frame " + std::to_string(f.frame_id) +
                               " in video '" + f.video_id + "'");
    }
  }
  std::unordered_map<std::string, std::vector<const CandidateRow*>> cand_index;
  for (const auto& c : candidates) cand_index[c.video_id].push_back(&c);

  std::unordered_map<std::string, int> truth_index;
  if (truth) {
    for (const auto& [vid, frame] : *truth) truth_index[vid] = frame;
  }

  std::vector<VideoRecord> videos;
  for (const auto& vid : order) {
    VideoRecord v;
    v.video_id = vid;
    auto cit = cand_index.find(vid);
    if (cit == cand_index.end()) {
      throw std::runtime_error("video '" + vid + "' has no candidate manifest rows");
    }
    for (const CandidateRow* c : cit->second) {
      auto fit = feat_index[vid].find(c->frame_id);
      if (fit == feat_index[vid].end()) {
        throw std::runtime_error("candidate frame " + std::to_string(c->frame_id) +
                                 " of video '" + vid + "' has no feature row");
      }
      CandidateFrame cf;
      cf.frame_id = c->frame_id;
      cf.feature = fit->second->features;
      cf.cluster_size = c->cluster_size;
      cf.representativeness = c->representativeness;
      v.candidates.push_back(std::move(cf));
    }
    if (truth) {
      auto tit = truth_index.find(vid);
      if (tit != truth_index.end()) v.ground_truth = tit->second;
    }
    v.validate();
    videos.push_back(std::move(v));
  }
  return videos;
}

namespace {

constexpr char kCheckpointMagic[8] = {'A', 'M', 'U', 'S', 'E', 'C', 'P', '1'};

void put_u32(std::string& out, uint32_t x) {
  char b[4];
  std::memcpy(b, &x, 4);
  out.append(b, 4);
}
void put_u64(std::string& out, uint64_t x) {
  char b[8];
  std::memcpy(b, &x, 8);
  out.append(b, 8);
}
void put_f64(std::string& out, double x) {
  char b[8];
  std::memcpy(b, &x, 8);
  out.append(b, 8);
}
void put_mat(std::string& out, const Mat& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) put_f64(out, m(r, c));
  }
}
void put_vec(std::string& out, const Vec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) put_f64(out, v[i]);
}

struct Reader {
  std::string data;
  size_t pos = 0;
  const std::string& path;

  void need(size_t n) {
    if (pos + n > data.size()) {
      throw std::runtime_error("truncated checkpoint: " + path);
    }
  }
  uint32_t u32() {
    need(4);
    uint32_t x;
    std::memcpy(&x, data.data() + pos, 4);
    pos += 4;
    return x;
  }
  uint64_t u64() {
    need(8);
    uint64_t x;
    std::memcpy(&x, data.data() + pos, 8);
    pos += 8;
    return x;
  }
  double f64() {
    need(8);
    double x;
    std::memcpy(&x, data.data() + pos, 8);
    pos += 8;
    return x;
  }
  void mat(Mat& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = f64();
    }
  }
  void vec(Vec& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = f64();
  }
};

}  // namespace

void save_checkpoint(const Checkpoint& ck, const std::string& path) {
  ck.params.dims.validate();
  std::string out(kCheckpointMagic, sizeof(kCheckpointMagic));
  put_u32(out, 1);
  put_u32(out, uint32_t(ck.params.dims.d_raw));
  put_u32(out, uint32_t(ck.params.dims.d_hidden));
  put_u32(out, uint32_t(ck.params.dims.d_feat));
  put_u32(out, uint32_t(ck.params.dims.d_sem));
  put_u64(out, ck.seed);
  put_f64(out, ck.hyper.alpha);
  put_f64(out, ck.hyper.eta);
  put_f64(out, ck.hyper.gamma);
  put_f64(out, ck.hyper.mu);
  put_f64(out, ck.lambda);
  put_mat(out, ck.params.adapter_w1);
  put_vec(out, ck.params.adapter_b1);
  put_mat(out, ck.params.adapter_w2);
  put_vec(out, ck.params.adapter_b2);
  put_mat(out, ck.params.attn_w);
  put_mat(out, ck.params.vis_w);
  write_text_atomic(path, out);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  Reader r{ss.str(), 0, path};
  r.need(sizeof(kCheckpointMagic));
  if (std::memcmp(r.data.data(), kCheckpointMagic, sizeof(kCheckpointMagic)) != 0) {
    throw std::runtime_error("not a checkpoint file: " + path);
  }
  r.pos = sizeof(kCheckpointMagic);
  uint32_t version = r.u32();
  if (version != 1) {
    throw std::runtime_error("unsupported checkpoint version " +
                             std::to_string(version) + ": " + path);
  }
  Checkpoint ck;
  ck.params.dims.d_raw = int(r.u32());
  ck.params.dims.d_hidden = int(r.u32());
  ck.params.dims.d_feat = int(r.u32());
  ck.params.dims.d_sem = int(r.u32());
  ck.params.dims.validate();
  ck.seed = r.u64();
  ck.hyper.alpha = r.f64();
  ck.hyper.eta = r.f64();
  ck.hyper.gamma = r.f64();
  ck.hyper.mu = r.f64();
  ck.lambda = r.f64();
  const ModelDims& d = ck.params.dims;
  ck.params.adapter_w1.resize(d.d_hidden, d.d_raw);
  ck.params.adapter_b1.resize(d.d_hidden);
  ck.params.adapter_w2.resize(d.d_feat, d.d_hidden);
  ck.params.adapter_b2.resize(d.d_feat);
  ck.params.attn_w.resize(d.d_feat, d.d_sem);
  ck.params.vis_w.resize(d.d_sem, d.d_feat);
  r.mat(ck.params.adapter_w1);
  r.vec(ck.params.adapter_b1);
  r.mat(ck.params.adapter_w2);
  r.vec(ck.params.adapter_b2);
  r.mat(ck.params.attn_w);
  r.mat(ck.params.vis_w);
  if (r.pos != r.data.size()) {
    throw std::runtime_error("trailing bytes in checkpoint: " + path);
  }
  return ck;
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  size_t line_no = 0;
  auto trim = [](std::string s) {
    size_t a = s.find_first_not_of(" \t\r");
    size_t b = s.find_last_not_of(" \t\r");
    if (a == std::string::npos) return std::string();
    return s.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected 'key = value'");
    }
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty()) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": empty key");
    }
    kv[key] = value;
  }
  return kv;
}

}  // namespace amuse
