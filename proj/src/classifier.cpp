#include "iwas/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>

#include "iwas/hash.hpp"
#include "iwas/utf8.hpp"

namespace iwas {

namespace {

double logistic(double z) {
  // Clamp keeps the output strictly inside (0,1) even for saturated inputs.
  z = std::clamp(z, -30.0, 30.0);
  return 1.0 / (1.0 + std::exp(-z));
}

double dot(const FeatureVector& x, const std::vector<double>& w, double bias) {
  double z = bias;
  for (const auto& [idx, count] : x) {
    if (idx < w.size()) z += w[idx] * count;
  }
  return z;
}

struct ModelState {
  std::vector<double> weights;
  double bias;
};

}  // namespace

FeatureVector featurize(const std::string& text, int n_lo, int n_hi, std::size_t max_len) {
  if (n_lo < 1 || n_hi < n_lo) throw std::invalid_argument("bad n-gram range");
  auto cps = utf8::decode(text);
  if (cps.size() > max_len) cps.resize(max_len);

  FeatureVector out;
  std::string gram;
  for (int n = n_lo; n <= n_hi; ++n) {
    if (cps.size() < static_cast<std::size_t>(n)) break;
    for (std::size_t i = 0; i + n <= cps.size(); ++i) {
      gram.clear();
      for (int k = 0; k < n; ++k) utf8::append(gram, cps[i + k]);
      ++out[static_cast<std::uint32_t>(fnv1a64(gram) & (kFeatureSpace - 1))];
    }
  }
  return out;
}

void validate_train_config(const TrainConfig& cfg) {
  if (cfg.learning_rate <= 0) throw std::invalid_argument("learning_rate must be positive");
  if (cfg.batch_size < 1) throw std::invalid_argument("batch_size must be positive");
  if (cfg.max_sentence_len < 1) throw std::invalid_argument("max_sentence_len must be positive");
  if (cfg.max_epochs < 1) throw std::invalid_argument("max_epochs must be positive");
  if (!(cfg.dev_fraction > 0.0 && cfg.dev_fraction < 1.0)) {
    throw std::invalid_argument("dev_fraction must be in (0,1)");
  }
  if (cfg.n_lo < 1 || cfg.n_hi < cfg.n_lo) throw std::invalid_argument("bad n-gram range");
}

double cross_entropy_loss(const std::vector<const FeatureVector*>& xs,
                          const std::vector<int>& ys, const std::vector<double>& weights,
                          double bias) {
  if (xs.empty() || xs.size() != ys.size()) {
    throw std::invalid_argument("loss needs matching, non-empty inputs");
  }
  double loss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double p = logistic(dot(*xs[i], weights, bias));
    loss += ys[i] == 1 ? -std::log(p) : -std::log(1.0 - p);
  }
  return loss / static_cast<double>(xs.size());
}

void cross_entropy_gradient(const std::vector<const FeatureVector*>& xs,
                            const std::vector<int>& ys,
                            const std::vector<double>& weights, double bias,
                            std::map<std::uint32_t, double>& grad_weights,
                            double& grad_bias) {
  if (xs.empty() || xs.size() != ys.size()) {
    throw std::invalid_argument("gradient needs matching, non-empty inputs");
  }
  grad_weights.clear();
  grad_bias = 0.0;
  const double inv_n = 1.0 / static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double err = logistic(dot(*xs[i], weights, bias)) - ys[i];
    for (const auto& [idx, count] : *xs[i]) {
      grad_weights[idx] += err * count * inv_n;
    }
    grad_bias += err * inv_n;
  }
}

ScorerModel train_classifier(const std::vector<LabeledSentence>& train,
                             const TrainConfig& cfg, const ScorerModel* warm_start,
                             TrainTrace* trace) {
  validate_train_config(cfg);
  if (train.empty()) throw std::runtime_error("empty training set");
  {
    std::size_t positives = 0;
    for (const auto& s : train) positives += s.label == 1;
    if (positives == 0 || positives == train.size()) {
      throw std::runtime_error("degenerate training set: all labels are " +
                               std::to_string(train.front().label));
    }
  }
  if (warm_start && warm_start->weights.size() != kFeatureSpace) {
    throw std::runtime_error("warm-start model has wrong weight vector length");
  }

  std::vector<FeatureVector> features(train.size());
  std::vector<int> labels(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    features[i] = featurize(train[i].text, cfg.n_lo, cfg.n_hi, cfg.max_sentence_len);
    labels[i] = train[i].label;
  }

  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  seeded_shuffle(order, rng);

  const auto n_dev = std::clamp<std::size_t>(
      static_cast<std::size_t>(
          std::llround(cfg.dev_fraction * static_cast<double>(train.size()))),
      1, train.size() - 1);
  const std::vector<std::size_t> dev_idx(order.begin(), order.begin() + n_dev);
  std::vector<std::size_t> train_idx(order.begin() + n_dev, order.end());

  ModelState state;
  if (warm_start) {
    state.weights = warm_start->weights;
    state.bias = warm_start->bias;
  } else {
    state.weights.assign(kFeatureSpace, 0.0);
    state.bias = 0.0;
  }

  const auto dev_accuracy = [&](const ModelState& m) {
    std::size_t correct = 0;
    for (std::size_t i : dev_idx) {
      const int pred = logistic(dot(features[i], m.weights, m.bias)) >= 0.5 ? 1 : 0;
      correct += pred == labels[i];
    }
    return static_cast<double>(correct) / static_cast<double>(dev_idx.size());
  };

  // Best post-epoch state on the dev carve-out. The incoming parameters
  // (zeros or a warm start) only seed the trajectory and are never returned
  // as-is, so retraining on fresh data always takes effect.
  ModelState best;
  double best_acc = -1.0;
  std::uint32_t epochs_without_improvement = 0;
  std::uint32_t epochs_run = 0;

  std::vector<const FeatureVector*> batch_x;
  std::vector<int> batch_y;
  std::map<std::uint32_t, double> grad;
  for (std::uint32_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    seeded_shuffle(train_idx, rng);
    double epoch_loss = 0.0;
    std::size_t n_batches = 0;
    for (std::size_t start = 0; start < train_idx.size(); start += cfg.batch_size) {
      const std::size_t stop = std::min(train_idx.size(), start + cfg.batch_size);
      batch_x.clear();
      batch_y.clear();
      for (std::size_t k = start; k < stop; ++k) {
        batch_x.push_back(&features[train_idx[k]]);
        batch_y.push_back(labels[train_idx[k]]);
      }
      epoch_loss += cross_entropy_loss(batch_x, batch_y, state.weights, state.bias);
      ++n_batches;

      double grad_bias = 0.0;
      cross_entropy_gradient(batch_x, batch_y, state.weights, state.bias, grad, grad_bias);
      for (const auto& [idx, g] : grad) state.weights[idx] -= cfg.learning_rate * g;
      state.bias -= cfg.learning_rate * grad_bias;
    }
    ++epochs_run;

    const double acc = dev_accuracy(state);
    if (trace) {
      trace->epoch_losses.push_back(epoch_loss / static_cast<double>(n_batches));
      trace->dev_accuracies.push_back(acc);
    }
    if (acc > best_acc) {
      best = state;
      best_acc = acc;
      epochs_without_improvement = 0;
    } else if (++epochs_without_improvement >= cfg.early_stop_patience) {
      break;
    }
  }

  ScorerModel model;
  model.weights = std::move(best.weights);
  model.bias = best.bias;
  model.n_lo = cfg.n_lo;
  model.n_hi = cfg.n_hi;
  model.max_sentence_len = cfg.max_sentence_len;
  model.seed = cfg.seed;
  model.train_meta = {epochs_run, best_acc};
  return model;
}

double score(const ScorerModel& model, const std::string& text) {
  const auto x = featurize(text, model.n_lo, model.n_hi, model.max_sentence_len);
  return logistic(dot(x, model.weights, model.bias));
}

// ---------------------------------------------------------------------------
// Model file layout (version 1, all integers little-endian):
//   bytes 0..3   magic "IWSM"
//   u32          version (1)
//   i32 i32      n_lo, n_hi
//   u64          max_sentence_len
//   u64          seed
//   u32          train_meta.epochs_run
//   f64          train_meta.final_dev_accuracy
//   f64          bias
//   u64          weight count (must equal kFeatureSpace)
//   f64 * count  weights
// Doubles are IEEE-754 bit patterns, so save/load is an exact round trip.
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[4] = {'I', 'W', 'S', 'M'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>(v >> (8 * i));
  out.write(b, 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>(v >> (8 * i));
  out.write(b, 8);
}

void put_f64(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(out, bits);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) {
    throw std::runtime_error("model file truncated");
  }
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) {
    throw std::runtime_error("model file truncated");
  }
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

double get_f64(std::istream& in) {
  const std::uint64_t bits = get_u64(in);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace

void save_model(const ScorerModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out.write(kMagic, 4);
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(model.n_lo));
  put_u32(out, static_cast<std::uint32_t>(model.n_hi));
  put_u64(out, model.max_sentence_len);
  put_u64(out, model.seed);
  put_u32(out, model.train_meta.epochs_run);
  put_f64(out, model.train_meta.final_dev_accuracy);
  put_f64(out, model.bias);
  put_u64(out, model.weights.size());
  for (double w : model.weights) put_f64(out, w);
  out.flush();
  if (!out.good()) throw std::runtime_error("I/O error writing '" + path + "'");
}

ScorerModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model '" + path + "'");
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw std::runtime_error("'" + path + "' is not a scorer model file");
  }
  const std::uint32_t version = get_u32(in);
  if (version != kVersion) {
    throw std::runtime_error("model '" + path + "' has version " +
                             std::to_string(version) + "; this build reads version " +
                             std::to_string(kVersion));
  }
  ScorerModel model;
  model.n_lo = static_cast<int>(get_u32(in));
  model.n_hi = static_cast<int>(get_u32(in));
  model.max_sentence_len = get_u64(in);
  model.seed = get_u64(in);
  model.train_meta.epochs_run = get_u32(in);
  model.train_meta.final_dev_accuracy = get_f64(in);
  model.bias = get_f64(in);
  const std::uint64_t count = get_u64(in);
  if (count != kFeatureSpace) {
    throw std::runtime_error("model '" + path + "' has weight count " +
                             std::to_string(count) + ", expected " +
                             std::to_string(kFeatureSpace));
  }
  model.weights.resize(count);
  for (auto& w : model.weights) w = get_f64(in);
  in.peek();
  if (!in.eof()) throw std::runtime_error("model '" + path + "' has trailing bytes");
  return model;
}

std::vector<double> Scorer::score_batch(const std::vector<std::string>& texts) const {
  std::vector<double> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(score(t));
  return out;
}

double ModelScorer::score(const std::string& text) const {
  return iwas::score(model_, text);
}

std::vector<double> http_score(const HttpEndpoint& ep, const std::vector<std::string>& texts) {
  const nlohmann::json body = {{"texts", texts}};
  const nlohmann::json resp = http_post_json(ep, body, "scorer request");
  if (!resp.is_object() || !resp.contains("probs") || !resp["probs"].is_array()) {
    throw std::runtime_error("scorer request: schema error: missing 'probs' array");
  }
  const auto& probs = resp["probs"];
  if (probs.size() != texts.size()) {
    throw std::runtime_error("scorer request: schema error: expected " +
                             std::to_string(texts.size()) + " probs, got " +
                             std::to_string(probs.size()));
  }
  std::vector<double> out;
  out.reserve(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!probs[i].is_number()) {
      throw std::runtime_error("scorer request: schema error: probs[" +
                               std::to_string(i) + "] is not a number");
    }
    const double p = probs[i].get<double>();
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::runtime_error("scorer request: schema error: probs[" +
                               std::to_string(i) + "] = " + std::to_string(p) +
                               " outside [0,1]");
    }
    out.push_back(p);
  }
  return out;
}

double HttpScorer::score(const std::string& text) const {
  return score_batch({text}).front();
}

std::vector<double> HttpScorer::score_batch(const std::vector<std::string>& texts) const {
  return http_score(endpoint_, texts);
}

}  // namespace iwas
