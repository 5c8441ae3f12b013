#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "iwas/corpus.hpp"

namespace iwas {

// A comparative-word surface form. Circumfix entries wrap the vehicle with
// a prefix and a required suffix (跟…一样); simple entries have an empty
// suffix.
struct ComparativeEntry {
  std::string prefix;
  std::string suffix;
  std::string gloss;

  bool circumfix() const { return !suffix.empty(); }
  bool operator==(const ComparativeEntry&) const = default;
};

struct Lexicon {
  std::vector<ComparativeEntry> entries;
};

// Throws if entries are empty, a prefix is empty, or prefixes repeat.
void validate_lexicon(const Lexicon& lex);

// The built-in 7-entry comparative set (像 宛如 好似 仿佛 如同 跟…一样 好比).
Lexicon default_lexicon();

// One entry per line: prefix [TAB] suffix [TAB] gloss. Suffix may be empty.
Lexicon load_lexicon(const std::string& path);

// Word Replacement: swaps the substring under cw_span for the prefix of a
// uniformly drawn entry, excluding the entry matching the current surface
// form and, unless allow_circumfix, circumfix entries. cw_span is updated
// to cover the new prefix; topic/vehicle spans right of the comparative are
// shifted by the length delta. Deterministic given seed.
LabeledSentence replace_comparative(const LabeledSentence& s, const Lexicon& lex,
                                    std::uint64_t seed, bool allow_circumfix = false);

// Leftmost occurrence of any surface form in the lexicon (the longest
// match at that position wins; circumfix entries match by either part).
// Lets augmented text, which carries no annotations, be re-annotated so it
// satisfies corpus validation.
std::optional<Span> find_comparative(const std::string& text, const Lexicon& lex);

}  // namespace iwas
