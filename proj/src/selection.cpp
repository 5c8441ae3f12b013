#include "iwas/selection.hpp"

#include <cmath>
#include <stdexcept>

namespace iwas {

AugmentedSample select_augmented(int source_label, const std::vector<ScoredCandidate>& cands,
                                 double threshold, SelectionPolicy policy) {
  if (cands.empty()) throw std::invalid_argument("select_augmented: empty candidate list");
  if (source_label != 0 && source_label != 1) {
    throw std::invalid_argument("select_augmented: source label must be 0 or 1");
  }
  for (const auto& c : cands) {
    if (!std::isfinite(c.prob) || c.prob < 0.0 || c.prob > 1.0) {
      throw std::invalid_argument("select_augmented: candidate probability " +
                                  std::to_string(c.prob) + " outside [0,1]");
    }
  }

  std::size_t chosen = 0;
  for (std::size_t i = 1; i < cands.size(); ++i) {
    if (source_label == 1 ? cands[i].prob > cands[chosen].prob
                          : cands[i].prob < cands[chosen].prob) {
      chosen = i;
    }
  }

  AugmentedSample out;
  out.text = cands[chosen].candidate.full_text;
  out.chosen_index = static_cast<std::uint32_t>(chosen);
  out.chosen_prob = cands[chosen].prob;
  if (source_label == 1) {
    out.label = 1;
    if (policy == SelectionPolicy::Symmetric && out.chosen_prob < threshold) {
      out.label = 0;
      out.label_flipped = true;
    }
  } else {
    if (out.chosen_prob > threshold) {
      out.label = 1;
      out.label_flipped = true;
    } else {
      out.label = 0;
    }
  }
  return out;
}

}  // namespace iwas
