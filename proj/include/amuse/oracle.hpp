#pragma once

#include <string>
#include <vector>

#include "amuse/model.hpp"
#include "amuse/wordspace.hpp"

namespace amuse::oracle {

// Literal re-implementations used only for verification. They share types
// with the library but no computation paths: everything below is written
// with plain index loops so it can serve as an independent reference for
// the optimized code.

// Multi-kernel MMD as the raw double sum.
double mmd(const std::vector<std::vector<double>>& source,
           const std::vector<std::vector<double>>& target,
           const std::vector<double>& sigmas, const std::vector<double>& betas);

// Frequency-weighted popularity recomputed with naive loops over the raw
// tensors. `raw_counts` switches the per-word factor from normalized weight
// to the raw frequency.
double popularity(const ModelParams& params, const WordSpace& ws,
                  const TopicList& topics, const Vec& feature,
                  bool raw_counts = false);

}  // namespace amuse::oracle
