#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "amuse/objective.hpp"

namespace amuse {

struct CheckRow {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct CheckReport {
  std::vector<CheckRow> rows;

  bool all_pass() const;
  std::string table() const;
  void merge(const CheckReport& other);
};

// Central finite differences of the full objective against the analytic
// gradients, per tensor, across `n_seeds` random settings. Coordinates
// where the two-step FD estimates disagree sit on a hinge/ReLU kink where
// FD is not a valid reference; those are resampled. `sabotage_tensor`
// flips the analytic sign for one tensor so tests can prove the check
// catches a wrong gradient.
CheckReport check_gradients(uint64_t seed, int n_seeds = 10,
                            int coords_per_tensor = 20,
                            double h = 1e-5, double tol = 1e-4,
                            const std::string& sabotage_tensor = "");

// mk_mmd against the naive double-sum oracle on random batch pairs, plus
// the self-distance and bitwise-symmetry identities.
CheckReport check_mmd(uint64_t seed, int n_cases = 100);

// selector popularity against the loop oracle on random triples, with
// topic lists that include zero-shot-only vocabularies.
CheckReport check_popularity(uint64_t seed, int n_cases = 100);

}  // namespace amuse
