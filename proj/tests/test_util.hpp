#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include "amuse/linalg.hpp"
#include "amuse/rng.hpp"

namespace testutil {

// Scratch directory under the build tree, wiped per construction.
class TempDir {
 public:
  explicit TempDir(const std::string& name)
      : path_(std::filesystem::temp_directory_path() / ("amuse_test_" + name)) {
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }

  std::string file(const std::string& name) const {
    return (path_ / name).string();
  }
  std::string path() const { return path_.string(); }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline amuse::Vec random_vec(int dim, amuse::SplitMix64& rng) {
  amuse::Vec v(dim);
  for (int i = 0; i < dim; ++i) v[i] = rng.normal();
  return v;
}

inline amuse::Vec random_unit(int dim, amuse::SplitMix64& rng) {
  amuse::Vec v = random_vec(dim, rng);
  return v / v.norm();
}

}  // namespace testutil
