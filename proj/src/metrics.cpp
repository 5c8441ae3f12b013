#include "iwas/metrics.hpp"

#include <stdexcept>

namespace iwas {

ConfusionCounts confusion(const Scorer& scorer, const std::vector<LabeledSentence>& ds,
                          double threshold) {
  if (ds.empty()) throw std::invalid_argument("cannot evaluate on an empty dataset");
  std::vector<std::string> texts;
  texts.reserve(ds.size());
  for (const auto& s : ds) texts.push_back(s.text);
  const auto probs = scorer.score_batch(texts);
  ConfusionCounts c;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const int pred = probs[i] >= threshold ? 1 : 0;
    if (pred == 1) {
      ++(ds[i].label == 1 ? c.tp : c.fp);
    } else {
      ++(ds[i].label == 1 ? c.fn : c.tn);
    }
  }
  return c;
}

Metrics metrics(const ConfusionCounts& c) {
  const std::uint64_t total = c.total();
  if (total == 0) throw std::invalid_argument("empty confusion counts");
  Metrics m;
  m.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(total);
  if (c.tp + c.fp > 0) {
    m.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  }
  if (c.tp + c.fn > 0) {
    m.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  }
  if (m.precision + m.recall > 0.0) {
    m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  }
  return m;
}

}  // namespace iwas
