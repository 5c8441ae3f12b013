#include "iwas/pipeline.hpp"

#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <unordered_set>

#include "iwas/hash.hpp"
#include "iwas/utf8.hpp"

namespace iwas {

namespace {

using nlohmann::json;

std::uint64_t sentence_seed(const char* tag, std::uint64_t iteration_seed,
                            const std::string& id) {
  return Fnv1a64().bytes(tag).u64(iteration_seed).bytes(id).value();
}

// Prompt for a negative sentence without a comparative word: the first
// clause (text before the first comma), else the first 20 scalar values.
Prompt first_clause_prompt(const LabeledSentence& s) {
  const auto cps = utf8::decode(s.text);
  std::size_t end = 0;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    if (cps[i] == U'，' || cps[i] == U',') {
      end = i;
      break;
    }
  }
  if (end == 0) end = std::min<std::size_t>(20, cps.size());
  return Prompt{utf8::substr(s.text, 0, end), s.id, static_cast<std::uint32_t>(end)};
}

// Runs fn(0..n-1) on up to `threads` workers; rethrows the first failure.
void parallel_for(std::size_t n, std::uint32_t threads,
                  const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  const auto worker = [&] {
    while (!stop.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) break;
      try {
        fn(i);
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        stop.store(true);
      }
    }
  };
  std::vector<std::jthread> pool;
  const std::size_t n_workers = std::min<std::size_t>(threads, n);
  pool.reserve(n_workers);
  for (std::size_t t = 0; t < n_workers; ++t) pool.emplace_back(worker);
  pool.clear();  // join
  if (first_error) std::rethrow_exception(first_error);
}

json endpoint_to_json(const HttpEndpoint& ep) {
  return {{"url", ep.url},
          {"timeout_seconds", ep.timeout_seconds},
          {"auth_header", ep.auth_header}};
}

json sample_to_json(const AugmentedSample& s) {
  return {{"type", "sample"},
          {"text", s.text},
          {"label", s.label},
          {"source_id", s.source_id},
          {"iteration", s.iteration},
          {"chosen_index", s.chosen_index},
          {"chosen_prob", s.chosen_prob},
          {"label_flipped", s.label_flipped}};
}

AugmentedSample sample_from_json(const json& j) {
  AugmentedSample s;
  s.text = j.at("text").get<std::string>();
  s.label = j.at("label").get<int>();
  s.source_id = j.at("source_id").get<std::string>();
  s.iteration = j.at("iteration").get<std::uint32_t>();
  s.chosen_index = j.at("chosen_index").get<std::uint32_t>();
  s.chosen_prob = j.at("chosen_prob").get<double>();
  s.label_flipped = j.at("label_flipped").get<bool>();
  return s;
}

json report_to_json(const IterationReport& r) {
  json j = {{"iteration", r.iteration},
            {"train_size", r.train_size},
            {"augmented_size", r.augmented_size},
            {"skipped", r.skipped},
            {"flip_count", r.flip_count}};
  if (r.mean_prob_pos) j["mean_prob_pos"] = *r.mean_prob_pos;
  if (r.mean_prob_neg) j["mean_prob_neg"] = *r.mean_prob_neg;
  if (r.dev_accuracy) j["dev_accuracy"] = *r.dev_accuracy;
  return j;
}

IterationReport report_from_json(const json& j) {
  IterationReport r;
  r.iteration = j.at("iteration").get<std::uint32_t>();
  r.train_size = j.at("train_size").get<std::size_t>();
  r.augmented_size = j.at("augmented_size").get<std::size_t>();
  r.skipped = j.at("skipped").get<std::size_t>();
  r.flip_count = j.at("flip_count").get<std::size_t>();
  if (j.contains("mean_prob_pos")) r.mean_prob_pos = j["mean_prob_pos"].get<double>();
  if (j.contains("mean_prob_neg")) r.mean_prob_neg = j["mean_prob_neg"].get<double>();
  if (j.contains("dev_accuracy")) r.dev_accuracy = j["dev_accuracy"].get<double>();
  return r;
}

void checkpoint_iteration(const IwasConfig& cfg, std::uint32_t iteration,
                          const ScorerModel* model, const Manifest& slice,
                          const char* manifest_name) {
  if (cfg.checkpoint_dir.empty()) return;
  const auto dir =
      std::filesystem::path(cfg.checkpoint_dir) / ("iter-" + std::to_string(iteration));
  std::filesystem::create_directories(dir);
  if (model) save_model(*model, (dir / "model").string());
  write_manifest(slice, (dir / manifest_name).string());
}

}  // namespace

std::unique_ptr<GeneratorBackend> make_generator(const GeneratorConfig& cfg) {
  if (cfg.kind == "mock") {
    return std::make_unique<MockGenerator>(cfg.truncate_at_sentence_end);
  }
  if (cfg.kind == "http") {
    if (cfg.endpoint.url.empty()) {
      throw std::runtime_error("http generator requires an endpoint URL");
    }
    return std::make_unique<HttpGenerator>(cfg.endpoint);
  }
  throw std::runtime_error("unknown generator kind '" + cfg.kind + "'");
}

json config_to_json(const IwasConfig& cfg) {
  json lex = json::array();
  for (const auto& e : cfg.lexicon.entries) {
    lex.push_back({{"prefix", e.prefix}, {"suffix", e.suffix}, {"gloss", e.gloss}});
  }
  return {
      {"iterations", cfg.iterations},
      {"candidates_per_sentence", cfg.candidates_per_sentence},
      {"accumulation", cfg.accumulation == Accumulation::Replace ? "replace" : "accumulate"},
      {"augment_negatives", cfg.augment_negatives},
      {"generator",
       {{"kind", cfg.generator.kind},
        {"endpoint", endpoint_to_json(cfg.generator.endpoint)},
        {"top_k", cfg.generator.top_k},
        {"max_new_tokens", cfg.generator.max_new_tokens},
        {"truncate_at_sentence_end", cfg.generator.truncate_at_sentence_end}}},
      {"scorer",
       {{"kind", cfg.scorer.kind},
        {"endpoint", endpoint_to_json(cfg.scorer.endpoint)},
        {"train",
         {{"learning_rate", cfg.scorer.train.learning_rate},
          {"batch_size", cfg.scorer.train.batch_size},
          {"max_sentence_len", cfg.scorer.train.max_sentence_len},
          {"early_stop_patience", cfg.scorer.train.early_stop_patience},
          {"max_epochs", cfg.scorer.train.max_epochs},
          {"dev_fraction", cfg.scorer.train.dev_fraction},
          {"n_lo", cfg.scorer.train.n_lo},
          {"n_hi", cfg.scorer.train.n_hi}}}}},
      {"selection",
       {{"threshold", cfg.selection.threshold},
        {"policy",
         cfg.selection.policy == SelectionPolicy::NegativeOnly ? "negative-only"
                                                               : "symmetric"}}},
      {"lexicon", lex},
      {"allow_circumfix", cfg.allow_circumfix},
      {"seed", cfg.seed},
  };
}

std::string config_hash(const IwasConfig& cfg) {
  return hex16(fnv1a64(config_to_json(cfg).dump()));
}

ScorerModel train_basic(const std::vector<LabeledSentence>& train, const TrainConfig& cfg) {
  return train_classifier(train, cfg);
}

std::pair<std::vector<AugmentedSample>, IterationReport> run_iteration(
    const Scorer& scorer, const std::vector<LabeledSentence>& original,
    std::uint32_t iteration, const IwasConfig& cfg, const GeneratorBackend& backend) {
  validate_lexicon(cfg.lexicon);
  if (cfg.candidates_per_sentence < 1) {
    throw std::invalid_argument("candidates_per_sentence must be >= 1");
  }
  const std::uint64_t iteration_seed = cfg.seed + iteration;

  IterationReport report;
  report.iteration = iteration;

  struct Slot {
    const LabeledSentence* source = nullptr;
    std::optional<AugmentedSample> sample;
    bool skipped = false;
  };
  std::vector<Slot> slots;
  slots.reserve(original.size());
  for (const auto& s : original) {
    if (s.label == 0 && !cfg.augment_negatives) {
      ++report.skipped;
      continue;
    }
    slots.push_back({&s, std::nullopt, false});
  }

  const auto process = [&](std::size_t k) {
    const LabeledSentence& src = *slots[k].source;
    Prompt prompt;
    if (src.cw_span) {
      LabeledSentence replaced;
      try {
        replaced = replace_comparative(
            src, cfg.lexicon, sentence_seed("wr", iteration_seed, src.id),
            cfg.allow_circumfix);
      } catch (const std::exception&) {
        // Empty replacement pool: a data condition, not a backend failure.
        slots[k].skipped = true;
        return;
      }
      prompt = build_prompt(replaced);
    } else {
      prompt = first_clause_prompt(src);
    }

    GenerationRequest req;
    req.prompt = std::move(prompt);
    req.n = cfg.candidates_per_sentence;
    req.top_k = cfg.generator.top_k;
    req.max_new_tokens = cfg.generator.max_new_tokens;
    req.seed = sentence_seed("gen", iteration_seed, src.id);
    const auto cands = generate_candidates(backend, req);

    std::vector<std::string> texts;
    texts.reserve(cands.size());
    for (const auto& c : cands) texts.push_back(c.full_text);
    const auto probs = scorer.score_batch(texts);
    if (probs.size() != cands.size()) {
      throw std::runtime_error("scorer returned " + std::to_string(probs.size()) +
                               " probabilities for " + std::to_string(cands.size()) +
                               " candidates (source '" + src.id + "')");
    }

    std::vector<ScoredCandidate> scored;
    scored.reserve(cands.size());
    for (std::size_t i = 0; i < cands.size(); ++i) scored.push_back({cands[i], probs[i]});
    auto sample = select_augmented(src.label, scored, cfg.selection.threshold,
                                   cfg.selection.policy);
    sample.source_id = src.id;
    sample.iteration = iteration;
    slots[k].sample = std::move(sample);
  };

  try {
    parallel_for(slots.size(), cfg.parallelism, process);
  } catch (...) {
    // Abort the iteration but leave the completed prefix behind for
    // inspection and resumption.
    Manifest partial;
    partial.config_hash = config_hash(cfg);
    for (const auto& slot : slots) {
      if (slot.skipped) continue;
      if (!slot.sample) break;
      partial.samples.push_back(*slot.sample);
    }
    checkpoint_iteration(cfg, iteration, nullptr, partial, "manifest.partial.jsonl");
    throw;
  }

  std::vector<AugmentedSample> samples;
  samples.reserve(slots.size());
  double sum_pos = 0.0, sum_neg = 0.0;
  std::size_t n_pos = 0, n_neg = 0;
  for (const auto& slot : slots) {
    if (slot.skipped) {
      ++report.skipped;
      continue;
    }
    samples.push_back(*slot.sample);
    report.flip_count += slot.sample->label_flipped;
    if (slot.source->label == 1) {
      sum_pos += slot.sample->chosen_prob;
      ++n_pos;
    } else {
      sum_neg += slot.sample->chosen_prob;
      ++n_neg;
    }
  }
  report.augmented_size = samples.size();
  if (n_pos > 0) report.mean_prob_pos = sum_pos / static_cast<double>(n_pos);
  if (n_neg > 0) report.mean_prob_neg = sum_neg / static_cast<double>(n_neg);
  return {std::move(samples), report};
}

std::vector<LabeledSentence> merge_datasets(
    const std::vector<LabeledSentence>& original,
    const std::vector<std::vector<AugmentedSample>>& augmented, Accumulation policy) {
  std::vector<LabeledSentence> out = original;
  std::unordered_set<std::string> ids;
  for (const auto& s : original) {
    if (!ids.insert(s.id).second) {
      throw std::runtime_error("id collision on '" + s.id + "' in original data");
    }
  }
  const std::size_t first =
      policy == Accumulation::Replace && !augmented.empty() ? augmented.size() - 1 : 0;
  for (std::size_t set = first; set < augmented.size(); ++set) {
    for (const auto& a : augmented[set]) {
      LabeledSentence s;
      s.id = a.source_id + "#aug" + std::to_string(a.iteration);
      s.text = a.text;
      s.label = a.label;
      if (!ids.insert(s.id).second) {
        throw std::runtime_error("id collision on '" + s.id + "'");
      }
      out.push_back(std::move(s));
    }
  }
  return out;
}

IwasResult run_iwas(const std::vector<LabeledSentence>& train, const IwasConfig& cfg) {
  const auto backend = make_generator(cfg.generator);
  return run_iwas(train, cfg, *backend);
}

IwasResult run_iwas(const std::vector<LabeledSentence>& train, const IwasConfig& cfg,
                    const GeneratorBackend& backend) {
  if (cfg.iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  validate_dataset(train);

  const bool builtin = cfg.scorer.kind == "builtin";
  if (!builtin && cfg.scorer.kind != "http") {
    throw std::runtime_error("unknown scorer kind '" + cfg.scorer.kind + "'");
  }

  TrainConfig train_cfg = cfg.scorer.train;
  train_cfg.seed = cfg.seed;

  IwasResult result;
  result.manifest.config_hash = config_hash(cfg);

  std::optional<ScorerModel> model;
  std::unique_ptr<Scorer> external;
  if (builtin) {
    model = train_basic(train, train_cfg);
    checkpoint_iteration(cfg, 0, &*model, Manifest{result.manifest.config_hash, {}, {}},
                         "manifest.jsonl");
  } else {
    external = std::make_unique<HttpScorer>(cfg.scorer.endpoint);
  }

  std::vector<std::vector<AugmentedSample>> augmented_sets;
  for (std::uint32_t i = 1; i <= cfg.iterations; ++i) {
    std::unique_ptr<Scorer> current;
    if (builtin) current = std::make_unique<ModelScorer>(*model);
    auto [samples, report] =
        run_iteration(builtin ? *current : *external, train, i, cfg, backend);
    augmented_sets.push_back(std::move(samples));

    const auto merged = merge_datasets(train, augmented_sets, cfg.accumulation);
    report.train_size = merged.size();
    if (builtin) {
      model = train_classifier(merged, train_cfg, &*model);
      report.dev_accuracy = model->train_meta.final_dev_accuracy;
    }

    result.manifest.reports.push_back(report);
    for (const auto& s : augmented_sets.back()) result.manifest.samples.push_back(s);

    Manifest slice{result.manifest.config_hash, augmented_sets.back(), {report}};
    checkpoint_iteration(cfg, i, builtin ? &*model : nullptr, slice, "manifest.jsonl");
  }

  // Provenance invariants: sources resolve, one sample per source and
  // iteration.
  {
    std::unordered_set<std::string> train_ids;
    for (const auto& s : train) train_ids.insert(s.id);
    std::unordered_set<std::string> seen;
    for (const auto& a : result.manifest.samples) {
      if (!train_ids.count(a.source_id)) {
        throw std::logic_error("manifest sample references unknown source '" +
                               a.source_id + "'");
      }
      if (!seen.insert(a.source_id + "#" + std::to_string(a.iteration)).second) {
        throw std::logic_error("duplicate manifest entry for source '" + a.source_id +
                               "' iteration " + std::to_string(a.iteration));
      }
    }
  }

  result.model = std::move(model);
  return result;
}

void write_manifest(const Manifest& manifest, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  json header = {{"type", "header"}, {"config_hash", manifest.config_hash}};
  json reports = json::array();
  for (const auto& r : manifest.reports) reports.push_back(report_to_json(r));
  header["reports"] = reports;
  out << header.dump() << '\n';
  for (const auto& s : manifest.samples) out << sample_to_json(s).dump() << '\n';
  out.flush();
  if (!out.good()) throw std::runtime_error("I/O error writing '" + path + "'");
}

Manifest read_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open manifest '" + path + "'");
  Manifest manifest;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                               ": malformed JSON: " + e.what());
    }
    const auto type = j.value("type", "");
    try {
      if (type == "header") {
        if (have_header) {
          throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                                   ": duplicate header");
        }
        have_header = true;
        manifest.config_hash = j.at("config_hash").get<std::string>();
        for (const auto& r : j.value("reports", json::array())) {
          manifest.reports.push_back(report_from_json(r));
        }
      } else if (type == "sample") {
        manifest.samples.push_back(sample_from_json(j));
      } else {
        throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                                 ": unknown record type '" + type + "'");
      }
    } catch (const json::exception& e) {
      throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                               ": bad " + type + " record: " + e.what());
    }
  }
  if (!have_header) throw std::runtime_error(path + ": missing header record");
  return manifest;
}

}  // namespace iwas
