#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "iwas/generation.hpp"

namespace iwas {

struct ScoredCandidate {
  Candidate candidate;
  double prob = 0.0;  // simile probability in [0,1]
};

// NegativeOnly flips only negative sources whose minimum probability
// exceeds the threshold. Symmetric additionally flips a positive source
// whose best candidate still scores below the threshold.
enum class SelectionPolicy { NegativeOnly, Symmetric };

struct SelectionConfig {
  double threshold = 0.5;
  SelectionPolicy policy = SelectionPolicy::NegativeOnly;
};

// The selected candidate with its final label and provenance.
struct AugmentedSample {
  std::string text;
  int label = 0;
  std::string source_id;
  std::uint32_t iteration = 0;
  std::uint32_t chosen_index = 0;
  double chosen_prob = 0.0;
  bool label_flipped = false;

  bool operator==(const AugmentedSample&) const = default;
};

// Positive sources take the argmax-probability candidate and keep label 1;
// negative sources take the argmin and flip to 1 when even the minimum
// exceeds the threshold. Ties resolve to the lowest index. source_id and
// iteration are left for the caller to fill.
AugmentedSample select_augmented(int source_label, const std::vector<ScoredCandidate>& cands,
                                 double threshold = 0.5,
                                 SelectionPolicy policy = SelectionPolicy::NegativeOnly);

}  // namespace iwas
