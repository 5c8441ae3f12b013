#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "iwas/classifier.hpp"
#include "iwas/corpus.hpp"
#include "iwas/generation.hpp"
#include "iwas/lexicon.hpp"
#include "iwas/selection.hpp"

namespace iwas {

// Whether each iteration's augmented set replaces the previous one in the
// retraining mix (training stays at original + one augmented copy) or all
// iterations accumulate.
enum class Accumulation { Replace, Accumulate };

struct GeneratorConfig {
  std::string kind = "mock";  // "mock" | "http"
  HttpEndpoint endpoint;      // used when kind == "http"
  std::uint32_t top_k = 40;
  std::uint32_t max_new_tokens = 50;
  bool truncate_at_sentence_end = true;
};

struct ScorerConfig {
  std::string kind = "builtin";  // "builtin" | "http"
  TrainConfig train;             // used when kind == "builtin"
  HttpEndpoint endpoint;         // used when kind == "http"
};

struct IwasConfig {
  std::uint32_t iterations = 1;  // M
  std::uint32_t candidates_per_sentence = 10;
  Accumulation accumulation = Accumulation::Replace;
  bool augment_negatives = true;
  GeneratorConfig generator;
  ScorerConfig scorer;
  SelectionConfig selection;
  Lexicon lexicon = default_lexicon();
  bool allow_circumfix = false;
  std::uint32_t parallelism = 1;  // concurrent generate+score work items
  std::string checkpoint_dir;     // empty disables checkpointing
  // Master seed. Word replacement and generation derive per-iteration seeds
  // as seed + iteration, then per-sentence seeds by hashing in the source
  // id, so results do not depend on work-item interleaving. The builtin
  // scorer trains with this seed (it overrides scorer.train.seed).
  std::uint64_t seed = 0;
};

struct IterationReport {
  std::uint32_t iteration = 0;
  std::size_t train_size = 0;      // merged size used for retraining
  std::size_t augmented_size = 0;  // |D-hat| for this iteration
  std::size_t skipped = 0;         // ineligible sentences + empty WR pools
  std::size_t flip_count = 0;
  std::optional<double> mean_prob_pos;  // mean chosen_prob, label-1 sources
  std::optional<double> mean_prob_neg;  // mean chosen_prob, label-0 sources
  std::optional<double> dev_accuracy;   // retrained model; absent for an external scorer
};

// Full provenance of a run: every selected sample in source order plus the
// per-iteration reports, keyed by a hash of the resolved config.
struct Manifest {
  std::string config_hash;
  std::vector<AugmentedSample> samples;
  std::vector<IterationReport> reports;
};

struct IwasResult {
  std::optional<ScorerModel> model;  // absent when the scorer is external
  Manifest manifest;
};

std::unique_ptr<GeneratorBackend> make_generator(const GeneratorConfig& cfg);

nlohmann::json config_to_json(const IwasConfig& cfg);
std::string config_hash(const IwasConfig& cfg);

// Trains the iteration-0 detector on the original corpus.
ScorerModel train_basic(const std::vector<LabeledSentence>& train, const TrainConfig& cfg);

// One loop body over the ORIGINAL training set: word replacement (or a
// first-clause prompt for negatives without a comparative), candidate
// generation, scoring, selection. Produces exactly one sample per eligible
// sentence, in source order. On a generator/scorer failure the completed
// prefix is checkpointed to <checkpoint_dir>/iter-<i>/manifest.partial.jsonl
// and the error is rethrown.
std::pair<std::vector<AugmentedSample>, IterationReport> run_iteration(
    const Scorer& scorer, const std::vector<LabeledSentence>& original,
    std::uint32_t iteration, const IwasConfig& cfg, const GeneratorBackend& backend);

// Original data plus augmented sets per the accumulation policy. Augmented
// records get id source_id + "#aug" + iteration and carry no spans.
std::vector<LabeledSentence> merge_datasets(
    const std::vector<LabeledSentence>& original,
    const std::vector<std::vector<AugmentedSample>>& augmented, Accumulation policy);

// The full iterative loop: basic training, then iterations of
// augment-merge-retrain, each retrain warm-started from the previous best
// model. Checkpoints <dir>/iter-<i>/model and <dir>/iter-<i>/manifest.jsonl
// after every completed iteration when checkpoint_dir is set.
IwasResult run_iwas(const std::vector<LabeledSentence>& train, const IwasConfig& cfg);
// Same loop with an injected backend (tests, custom generators).
IwasResult run_iwas(const std::vector<LabeledSentence>& train, const IwasConfig& cfg,
                    const GeneratorBackend& backend);

// Manifest file: one header record carrying the config hash and reports,
// then one record per augmented sample, JSONL.
void write_manifest(const Manifest& manifest, const std::string& path);
Manifest read_manifest(const std::string& path);

}  // namespace iwas
