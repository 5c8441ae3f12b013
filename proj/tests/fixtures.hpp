#pragma once

#include <string>
#include <vector>

#include "iwas/corpus.hpp"

namespace iwas::fixtures {

// Fully annotated simile: 八月的天气就像是火炉一样烘烤着大地。
// topic 天气 [3,5), comparative 就像 [5,7), vehicle 火炉 [8,10).
LabeledSentence zh_example();

// English rendering with the comparative already swapped to "same as";
// build_prompt on it yields "The weather in August is same as".
LabeledSentence en_example();

// 50 records, every one augmentable (no empty replacement pools, negatives
// promptable), for the training-set size laws.
std::vector<LabeledSentence> all_eligible_50();

// 200 mixed records (positives across all comparatives, negatives with and
// without comparatives) for end-to-end determinism runs.
std::vector<LabeledSentence> mixed_200();

// Marker-word-labeled corpus: every positive carries 像…一样, every
// negative a literal frame. Linearly separable on character n-grams.
std::vector<LabeledSentence> separable_train_200();
std::vector<LabeledSentence> separable_test_100();

// Training data whose positives all use 像 (the biased regime) with
// vehicles the completion mock also knows; negatives use other nouns in
// literal frames.
std::vector<LabeledSentence> biased_train();

// Held-out set covering all seven comparatives, weighted roughly like the
// real distribution; non-像 positives use vehicles seen only in negative
// training contexts, so a biased detector misses them.
std::vector<LabeledSentence> diverse_test();

// Every fixture set above, for corpus-wide law checks.
std::vector<std::vector<LabeledSentence>> all_fixture_sets();

}  // namespace iwas::fixtures
