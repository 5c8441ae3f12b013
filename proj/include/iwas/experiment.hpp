#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "iwas/baselines.hpp"
#include "iwas/metrics.hpp"
#include "iwas/pipeline.hpp"

namespace iwas {

enum class AugmentMethod { None, Iwas, Eda, WoSc, WoWr };

std::string method_name(AugmentMethod m);
AugmentMethod parse_method(const std::string& name);  // "none"|"iwas"|"eda"|"wo-sc"|"wo-wr"

struct ExperimentConfig {
  AugmentMethod method = AugmentMethod::None;
  IwasConfig iwas;   // full-pipeline settings; generator/candidates/selection
                     // also feed the wo-wr ablation
  EdaConfig eda;     // alpha + synonym table; seeds come from the run
  TrainConfig train; // detector hyperparameters for every method
  std::string dataset_name = "test";
};

struct SeedRow {
  std::uint64_t seed = 0;
  Metrics metrics;
};

struct EvalReport {
  std::string dataset_name;
  std::string method;
  std::vector<SeedRow> rows;
  Metrics mean;  // arithmetic mean over rows, metric by metric
};

// Trains with the configured augmentation method under one seed and
// evaluates on the test set. Augmented records get ids suffixed with the
// method tag; per-sentence randomness is derived from (seed, sentence id).
Metrics run_single_seed(const ExperimentConfig& cfg,
                        const std::vector<LabeledSentence>& train,
                        const std::vector<LabeledSentence>& test, std::uint64_t seed);

// One run per seed plus the mean row. A failing run aborts the whole
// report with the seed named in the error.
EvalReport multiseed_run(const ExperimentConfig& cfg,
                         const std::vector<LabeledSentence>& train,
                         const std::vector<LabeledSentence>& test,
                         const std::vector<std::uint64_t>& seeds = {16, 32, 64, 128, 256});

}  // namespace iwas
