#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "iwas/corpus.hpp"
#include "iwas/http.hpp"

namespace iwas {

// Character n-gram counts hashed into 2^18 buckets (FNV-1a over the UTF-8
// bytes of each gram, masked to 18 bits).
inline constexpr std::uint32_t kFeatureSpace = 1u << 18;

using FeatureVector = std::map<std::uint32_t, std::uint32_t>;

// Counts all character n-grams for n in [n_lo, n_hi] after truncating the
// input to max_len scalar values.
FeatureVector featurize(const std::string& text, int n_lo = 1, int n_hi = 3,
                        std::size_t max_len = 256);

struct TrainMeta {
  std::uint32_t epochs_run = 0;
  double final_dev_accuracy = 0.0;
};

// Logistic regression over hashed character n-grams: the built-in simile
// probability source. Scoring is pure; a trained model may be shared across
// threads freely.
struct ScorerModel {
  std::vector<double> weights;  // length kFeatureSpace
  double bias = 0.0;
  int n_lo = 1;
  int n_hi = 3;
  std::size_t max_sentence_len = 256;
  std::uint64_t seed = 0;
  TrainMeta train_meta;
};

struct TrainConfig {
  double learning_rate = 2e-4;
  std::uint32_t batch_size = 128;
  std::size_t max_sentence_len = 256;   // longer inputs are truncated
  std::uint32_t early_stop_patience = 3;
  std::uint32_t max_epochs = 50;
  double dev_fraction = 0.1;
  int n_lo = 1;
  int n_hi = 3;
  std::uint64_t seed = 0;
};

void validate_train_config(const TrainConfig& cfg);

// Mean cross-entropy loss / its gradient for a batch. weights may be any
// length covering the feature indices in use; exposed so tests can check
// the analytic gradient against finite differences on small problems.
double cross_entropy_loss(const std::vector<const FeatureVector*>& xs,
                          const std::vector<int>& ys, const std::vector<double>& weights,
                          double bias);
void cross_entropy_gradient(const std::vector<const FeatureVector*>& xs,
                            const std::vector<int>& ys,
                            const std::vector<double>& weights, double bias,
                            std::map<std::uint32_t, double>& grad_weights,
                            double& grad_bias);

// Per-epoch trainer internals, for tests and progress reporting.
struct TrainTrace {
  std::vector<double> epoch_losses;      // epoch-average training loss
  std::vector<double> dev_accuracies;    // dev accuracy after each epoch
};

// Mini-batch gradient descent on the cross-entropy loss, fully
// deterministic given cfg.seed (dev carve-out, per-epoch shuffles). Early
// stops once dev accuracy fails to improve for early_stop_patience epochs
// and returns the best-dev snapshot. warm_start, when given, seeds the
// initial parameters (otherwise zeros).
ScorerModel train_classifier(const std::vector<LabeledSentence>& train,
                             const TrainConfig& cfg,
                             const ScorerModel* warm_start = nullptr,
                             TrainTrace* trace = nullptr);

// logistic(weights . featurize(text) + bias), always inside (0,1).
double score(const ScorerModel& model, const std::string& text);

// Versioned binary container; see save_model in classifier.cpp for the
// exact layout. Round-trips bit-exactly.
void save_model(const ScorerModel& model, const std::string& path);
ScorerModel load_model(const std::string& path);

// Anything that can turn text into a simile probability.
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual double score(const std::string& text) const = 0;
  virtual std::vector<double> score_batch(const std::vector<std::string>& texts) const;
};

class ModelScorer : public Scorer {
 public:
  explicit ModelScorer(ScorerModel model) : model_(std::move(model)) {}
  double score(const std::string& text) const override;
  const ScorerModel& model() const { return model_; }

 private:
  ScorerModel model_;
};

// POST {"texts": [...]} -> {"probs": [...]}, one probability in [0,1] per
// input, order preserved.
std::vector<double> http_score(const HttpEndpoint& ep, const std::vector<std::string>& texts);

class HttpScorer : public Scorer {
 public:
  explicit HttpScorer(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {}
  double score(const std::string& text) const override;
  std::vector<double> score_batch(const std::vector<std::string>& texts) const override;

 private:
  HttpEndpoint endpoint_;
};

}  // namespace iwas
