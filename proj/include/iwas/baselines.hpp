#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "iwas/classifier.hpp"
#include "iwas/corpus.hpp"
#include "iwas/generation.hpp"
#include "iwas/lexicon.hpp"
#include "iwas/selection.hpp"

namespace iwas {

using SynonymTable = std::map<std::string, std::vector<std::string>>;

// A handful of common-word entries, enough to make synonym replacement and
// insertion do something out of the box.
SynonymTable default_synonym_table();

// One entry per line: word<TAB>syn1,syn2,...
SynonymTable load_synonym_table(const std::string& path);

struct EdaConfig {
  double alpha = 0.1;  // fraction of units affected per op, in (0,1)
  SynonymTable synonym_table = default_synonym_table();
  std::uint64_t seed = 0;
};

// Easy-data-augmentation baseline: applies ONE of synonym replacement /
// random swap / random insertion / random deletion, chosen uniformly by
// seed. Units are Unicode scalar values (Chinese text carries no whitespace
// tokens); synonym lookups scan sliding 1-2-unit windows. The label is
// preserved; spans are invalidated by the edit and dropped. Deletion
// removes ceil(alpha*n) units but always retains at least one.
LabeledSentence eda_augment(const LabeledSentence& s, const EdaConfig& cfg);

// Ablation without sentence completion: word replacement alone.
LabeledSentence was_wo_sc(const LabeledSentence& s, const Lexicon& lex, std::uint64_t seed);

// Ablation without word replacement: the prompt keeps the original
// comparative, then generation, scoring, and selection run as in the full
// pipeline. One sample per sentence, iteration number 1.
AugmentedSample was_wo_wr(const LabeledSentence& s, const GeneratorBackend& backend,
                          const Scorer& scorer, std::uint64_t seed,
                          std::uint32_t candidates = 10,
                          const SelectionConfig& selection = {});

}  // namespace iwas
