#pragma once

#include <cstdint>
#include <vector>

#include "iwas/classifier.hpp"
#include "iwas/corpus.hpp"

namespace iwas {

// Positive class = simile.
struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;

  std::uint64_t total() const { return tp + fp + fn + tn; }
  bool operator==(const ConfusionCounts&) const = default;
};

struct Metrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Predict 1 iff score >= threshold (ties predict positive), tally against
// gold labels. Throws on an empty dataset.
ConfusionCounts confusion(const Scorer& scorer, const std::vector<LabeledSentence>& ds,
                          double threshold = 0.5);

// accuracy = (tp+tn)/total, precision = tp/(tp+fp), recall = tp/(tp+fn),
// f1 = 2PR/(P+R); each ratio is 0 when its denominator is 0. Throws when
// total is 0.
Metrics metrics(const ConfusionCounts& c);

}  // namespace iwas
