#include "iwas/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "iwas/baselines.hpp"
#include "iwas/corpus.hpp"
#include "iwas/experiment.hpp"
#include "iwas/hash.hpp"
#include "iwas/metrics.hpp"
#include "iwas/pipeline.hpp"

namespace iwas {

namespace {

// Matches the per-sentence derivation inside multiseed runs, so one-shot
// `augment` output reproduces what an experiment seed produced.
std::uint64_t sentence_seed(std::uint64_t run_seed, const std::string& id) {
  return Fnv1a64().bytes("exp").u64(run_seed).bytes(id).value();
}

struct TrainOpts {
  TrainConfig cfg;
  void attach(CLI::App* sub) {
    sub->add_option("--lr", cfg.learning_rate, "Learning rate")->capture_default_str();
    sub->add_option("--batch-size", cfg.batch_size, "Mini-batch size")
        ->capture_default_str();
    sub->add_option("--max-len", cfg.max_sentence_len,
                    "Sentence truncation length (scalar values)")
        ->capture_default_str();
    sub->add_option("--patience", cfg.early_stop_patience,
                    "Epochs without dev improvement before stopping")
        ->capture_default_str();
    sub->add_option("--max-epochs", cfg.max_epochs, "Epoch cap")->capture_default_str();
    sub->add_option("--dev-fraction", cfg.dev_fraction,
                    "Fraction of training data held out for early stopping")
        ->capture_default_str();
  }
};

struct GeneratorOpts {
  GeneratorConfig cfg;
  void attach(CLI::App* sub) {
    sub->add_option("--generator", cfg.kind, "Completion backend")
        ->check(CLI::IsMember({"mock", "http"}))
        ->capture_default_str();
    sub->add_option("--gen-url", cfg.endpoint.url, "Completion server URL");
    sub->add_option("--gen-timeout", cfg.endpoint.timeout_seconds,
                    "Completion request timeout, seconds")
        ->capture_default_str();
    sub->add_option("--gen-auth", cfg.endpoint.auth_header,
                    "Authorization header value for the completion server");
    sub->add_option("--top-k", cfg.top_k, "Sampling pool size")->capture_default_str();
    sub->add_option("--max-new-tokens", cfg.max_new_tokens,
                    "Completion length cap (scalar values)")
        ->capture_default_str();
    sub->add_flag("--no-sentence-truncate",
                  [this](std::int64_t) { cfg.truncate_at_sentence_end = false; },
                  "Keep completions past the first sentence-ending mark");
  }
};

struct SelectionOpts {
  SelectionConfig cfg;
  void attach(CLI::App* sub) {
    sub->add_option("--threshold", cfg.threshold, "Probability threshold")
        ->capture_default_str();
    sub->add_option_function<std::string>(
           "--policy",
           [this](const std::string& v) {
             cfg.policy = v == "symmetric" ? SelectionPolicy::Symmetric
                                           : SelectionPolicy::NegativeOnly;
           },
           "Flip policy for selected candidates")
        ->check(CLI::IsMember({"negative-only", "symmetric"}))
        ->default_str("negative-only");
  }
};

struct LexiconOpts {
  std::string path;
  bool allow_circumfix = false;
  void attach(CLI::App* sub) {
    sub->add_option("--lexicon", path, "Comparative-word lexicon file (TSV)");
    sub->add_flag("--allow-circumfix", allow_circumfix,
                  "Let replacement pick circumfix comparatives");
  }
  Lexicon resolve() const { return path.empty() ? default_lexicon() : load_lexicon(path); }
};

void echo_config(CLI::App* sub, std::ostream& out) {
  out << "# resolved config [" << sub->get_name() << "]\n";
  std::istringstream cfg(sub->config_to_str(true, false));
  std::string line;
  while (std::getline(cfg, line)) {
    if (!line.empty()) out << "#   " << line << '\n';
  }
}

void print_metrics(std::ostream& out, const ConfusionCounts& c, const Metrics& m) {
  out << "counts: tp=" << c.tp << " fp=" << c.fp << " fn=" << c.fn << " tn=" << c.tn
      << '\n';
  out << std::fixed << std::setprecision(4);
  out << "accuracy: " << m.accuracy << '\n';
  if (c.fp + c.tn == 0) {
    out << "note: no negative records; accuracy is the whole story\n";
  } else {
    out << "precision: " << m.precision << '\n';
    out << "recall: " << m.recall << '\n';
    out << "f1: " << m.f1 << '\n';
  }
  out.unsetf(std::ios::fixed);
  out << std::setprecision(6);
}

nlohmann::json row_json(const std::string& seed, const Metrics& m) {
  return {{"seed", seed},
          {"accuracy", m.accuracy},
          {"precision", m.precision},
          {"recall", m.recall},
          {"f1", m.f1}};
}

void cmd_stats(const std::string& data, std::ostream& out) {
  const auto ds = load_dataset(data);
  const auto stats = corpus_stats(ds);
  out << "sentences: " << stats.n_sentences << '\n';
  out << "simile: " << stats.n_simile << '\n';
  out << "non-simile: " << stats.n_non_simile << '\n';
  out << "tokens: " << stats.n_tokens << '\n';
  out << "comparative histogram:\n";
  std::vector<std::pair<std::string, std::size_t>> rows(stats.cw_histogram.begin(),
                                                        stats.cw_histogram.end());
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  for (const auto& [cw, n] : rows) out << "  " << cw << '\t' << n << '\n';
}

struct AugmentArgs {
  std::string data, out_path, method, model_path, synonyms;
  std::uint64_t seed = 0;
  std::uint32_t candidates = 10;
  double alpha = 0.1;
};

void cmd_augment(const AugmentArgs& a, const GeneratorOpts& gen, const SelectionOpts& sel,
                 const LexiconOpts& lexopts, std::ostream& out) {
  const auto ds = load_dataset(a.data);
  validate_dataset(ds);
  const auto method = parse_method(a.method);
  const auto lex = lexopts.resolve();
  std::vector<LabeledSentence> augmented;
  std::size_t skipped = 0;

  const auto need_model = [&]() -> ScorerModel {
    if (a.model_path.empty()) {
      throw std::runtime_error("--method " + a.method + " needs --model (a trained scorer)");
    }
    return load_model(a.model_path);
  };

  // Output files must pass corpus validation, which requires a comparative
  // span on every simile. Augmented text carries no annotations, so recover
  // the span by scanning for a lexicon surface; a simile whose edit
  // destroyed the comparative cannot be exported and counts as skipped.
  const auto keep = [&](LabeledSentence rec) {
    if (rec.label == 1 && !rec.cw_span) rec.cw_span = find_comparative(rec.text, lex);
    if (rec.label == 1 && !rec.cw_span) {
      ++skipped;
      return;
    }
    augmented.push_back(std::move(rec));
  };

  switch (method) {
    case AugmentMethod::Eda: {
      EdaConfig cfg;
      cfg.alpha = a.alpha;
      if (!a.synonyms.empty()) cfg.synonym_table = load_synonym_table(a.synonyms);
      for (const auto& s : ds) {
        cfg.seed = sentence_seed(a.seed, s.id);
        auto aug = eda_augment(s, cfg);
        aug.id = s.id + "#eda";
        keep(std::move(aug));
      }
      break;
    }
    case AugmentMethod::WoSc: {
      for (const auto& s : ds) {
        if (s.label != 1 || !s.cw_span) {
          ++skipped;
          continue;
        }
        auto aug = was_wo_sc(s, lex, sentence_seed(a.seed, s.id));
        aug.id = s.id + "#wosc";
        keep(std::move(aug));
      }
      break;
    }
    case AugmentMethod::WoWr: {
      const ModelScorer scorer(need_model());
      const auto backend = make_generator(gen.cfg);
      for (const auto& s : ds) {
        if (s.label != 1 || !s.cw_span) {
          ++skipped;
          continue;
        }
        const auto sample = was_wo_wr(s, *backend, scorer, sentence_seed(a.seed, s.id),
                                      a.candidates, sel.cfg);
        LabeledSentence rec;
        rec.id = s.id + "#wowr";
        rec.text = sample.text;
        rec.label = sample.label;
        keep(std::move(rec));
      }
      break;
    }
    case AugmentMethod::Iwas: {
      const ModelScorer scorer(need_model());
      IwasConfig cfg;
      cfg.candidates_per_sentence = a.candidates;
      cfg.generator = gen.cfg;
      cfg.selection = sel.cfg;
      cfg.lexicon = lex;
      cfg.allow_circumfix = lexopts.allow_circumfix;
      cfg.seed = a.seed;
      const auto backend = make_generator(cfg.generator);
      const auto [samples, report] = run_iteration(scorer, ds, 1, cfg, *backend);
      skipped = report.skipped;
      for (const auto& sample : samples) {
        LabeledSentence rec;
        rec.id = sample.source_id + "#aug" + std::to_string(sample.iteration);
        rec.text = sample.text;
        rec.label = sample.label;
        keep(std::move(rec));
      }
      break;
    }
    case AugmentMethod::None:
      throw std::runtime_error("--method none produces nothing to write");
  }

  validate_dataset(augmented);
  write_dataset(augmented, a.out_path);
  out << "augmented: " << augmented.size() << '\n';
  out << "skipped: " << skipped << '\n';
  out << "wrote: " << a.out_path << '\n';
}

void print_report_line(std::ostream& out, const IterationReport& r) {
  out << "iteration " << r.iteration << ": train_size=" << r.train_size
      << " augmented=" << r.augmented_size << " skipped=" << r.skipped
      << " flips=" << r.flip_count;
  if (r.dev_accuracy) out << " dev_accuracy=" << *r.dev_accuracy;
  out << '\n';
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simile detection via comparative-word replacement and LM completion"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Flat key=value config file; flags override it")
      ->envname("IWAS_CONFIG");

  // --- stats ---
  auto* stats = app.add_subcommand("stats", "Corpus counts and comparative histogram");
  struct {
    std::string data;
  } stats_args;
  stats->add_option("--data", stats_args.data, "JSONL dataset")->required();
  stats->callback([&] {
    echo_config(stats, out);
    cmd_stats(stats_args.data, out);
  });

  // --- train ---
  auto* train = app.add_subcommand("train", "Train the detector and save the model");
  struct {
    std::string data, model;
    std::uint64_t seed = 0;
  } train_args;
  TrainOpts train_opts;
  train->add_option("--data", train_args.data, "JSONL training data")->required();
  train->add_option("--model", train_args.model, "Output model path")->required();
  train->add_option("--seed", train_args.seed, "Training seed")->capture_default_str();
  train_opts.attach(train);
  train->callback([&] {
    echo_config(train, out);
    const auto ds = load_dataset(train_args.data);
    validate_dataset(ds);
    TrainConfig cfg = train_opts.cfg;
    cfg.seed = train_args.seed;
    const auto model = train_classifier(ds, cfg);
    save_model(model, train_args.model);
    out << "epochs: " << model.train_meta.epochs_run << '\n';
    out << "dev_accuracy: " << model.train_meta.final_dev_accuracy << '\n';
    out << "wrote: " << train_args.model << '\n';
  });

  // --- augment ---
  auto* augment = app.add_subcommand("augment", "One-shot augmentation to JSONL");
  AugmentArgs augment_args;
  GeneratorOpts augment_gen;
  SelectionOpts augment_sel;
  LexiconOpts augment_lex;
  augment->add_option("--data", augment_args.data, "JSONL dataset")->required();
  augment->add_option("--out", augment_args.out_path, "Output JSONL path")->required();
  augment->add_option("--method", augment_args.method, "Augmentation method")
      ->required()
      ->check(CLI::IsMember({"iwas", "eda", "wo-sc", "wo-wr"}));
  augment->add_option("--model", augment_args.model_path,
                      "Trained scorer (iwas and wo-wr)");
  augment->add_option("--seed", augment_args.seed, "Run seed")->capture_default_str();
  augment->add_option("--candidates", augment_args.candidates,
                      "Completions per sentence")
      ->capture_default_str();
  augment->add_option("--alpha", augment_args.alpha, "EDA edit fraction")
      ->capture_default_str();
  augment->add_option("--synonyms", augment_args.synonyms, "Synonym table file (EDA)");
  augment_gen.attach(augment);
  augment_sel.attach(augment);
  augment_lex.attach(augment);
  augment->callback([&] {
    echo_config(augment, out);
    cmd_augment(augment_args, augment_gen, augment_sel, augment_lex, out);
  });

  // --- iwas-run ---
  auto* run = app.add_subcommand("iwas-run", "Full iterative augment-retrain loop");
  struct {
    std::string data, test, out_dir;
    std::uint64_t seed = 0;
    std::uint32_t iterations = 1;
    std::uint32_t candidates = 10;
    std::uint32_t parallelism = 1;
    bool accumulate = false;
    bool no_negatives = false;
  } run_args;
  TrainOpts run_train;
  GeneratorOpts run_gen;
  SelectionOpts run_sel;
  LexiconOpts run_lex;
  run->add_option("--data", run_args.data, "JSONL training data")->required();
  run->add_option("--test", run_args.test, "Optional JSONL test data to evaluate");
  run->add_option("--out-dir", run_args.out_dir, "Checkpoint/output directory")
      ->required();
  run->add_option("--seed", run_args.seed, "Master seed")->capture_default_str();
  run->add_option("--iterations", run_args.iterations, "Augment-retrain rounds")
      ->capture_default_str();
  run->add_option("--candidates", run_args.candidates, "Completions per sentence")
      ->capture_default_str();
  run->add_option("--parallelism", run_args.parallelism,
                  "Concurrent generate+score work items")
      ->capture_default_str();
  run->add_flag("--accumulate", run_args.accumulate,
                "Keep all iterations' samples in the training mix");
  run->add_flag("--no-augment-negatives", run_args.no_negatives,
                "Augment only simile sentences");
  run_train.attach(run);
  run_gen.attach(run);
  run_sel.attach(run);
  run_lex.attach(run);
  run->callback([&] {
    echo_config(run, out);
    const auto ds = load_dataset(run_args.data);
    IwasConfig cfg;
    cfg.iterations = run_args.iterations;
    cfg.candidates_per_sentence = run_args.candidates;
    cfg.accumulation =
        run_args.accumulate ? Accumulation::Accumulate : Accumulation::Replace;
    cfg.augment_negatives = !run_args.no_negatives;
    cfg.generator = run_gen.cfg;
    cfg.scorer.train = run_train.cfg;
    cfg.selection = run_sel.cfg;
    cfg.lexicon = run_lex.resolve();
    cfg.allow_circumfix = run_lex.allow_circumfix;
    cfg.parallelism = run_args.parallelism;
    cfg.checkpoint_dir = run_args.out_dir;
    cfg.seed = run_args.seed;

    const auto result = run_iwas(ds, cfg);
    out << "config_hash: " << result.manifest.config_hash << '\n';
    for (const auto& r : result.manifest.reports) print_report_line(out, r);

    namespace fs = std::filesystem;
    fs::create_directories(run_args.out_dir);
    const auto model_path = (fs::path(run_args.out_dir) / "model").string();
    const auto manifest_path = (fs::path(run_args.out_dir) / "manifest.jsonl").string();
    save_model(*result.model, model_path);
    write_manifest(result.manifest, manifest_path);
    out << "wrote: " << model_path << '\n';
    out << "wrote: " << manifest_path << '\n';

    if (!run_args.test.empty()) {
      const auto test_ds = load_dataset(run_args.test);
      const ModelScorer scorer(*result.model);
      const auto counts = confusion(scorer, test_ds, run_sel.cfg.threshold);
      print_metrics(out, counts, metrics(counts));
    }
  });

  // --- eval ---
  auto* eval = app.add_subcommand("eval", "Score a dataset with a saved model");
  struct {
    std::string model, data;
    double threshold = 0.5;
  } eval_args;
  eval->add_option("--model", eval_args.model, "Saved model path")->required();
  eval->add_option("--data", eval_args.data, "JSONL dataset")->required();
  eval->add_option("--threshold", eval_args.threshold, "Positive-prediction threshold")
      ->capture_default_str();
  eval->callback([&] {
    echo_config(eval, out);
    const ModelScorer scorer(load_model(eval_args.model));
    const auto ds = load_dataset(eval_args.data);
    const auto counts = confusion(scorer, ds, eval_args.threshold);
    print_metrics(out, counts, metrics(counts));
  });

  // --- multiseed ---
  auto* multi = app.add_subcommand("multiseed", "Train+evaluate across seeds");
  struct {
    std::string data, test, method = "none", jsonl, synonyms, dataset_name;
    std::vector<std::uint64_t> seeds = {16, 32, 64, 128, 256};
    std::uint32_t iterations = 1;
    std::uint32_t candidates = 10;
    bool accumulate = false;
    bool no_negatives = false;
    double alpha = 0.1;
  } multi_args;
  TrainOpts multi_train;
  GeneratorOpts multi_gen;
  SelectionOpts multi_sel;
  LexiconOpts multi_lex;
  multi->add_option("--data", multi_args.data, "JSONL training data")->required();
  multi->add_option("--test", multi_args.test, "JSONL test data")->required();
  multi->add_option("--method", multi_args.method, "Augmentation method")
      ->check(CLI::IsMember({"none", "iwas", "eda", "wo-sc", "wo-wr"}))
      ->capture_default_str();
  multi->add_option("--seeds", multi_args.seeds, "Seed list")
      ->delimiter(',')
      ->capture_default_str();
  multi->add_option("--jsonl", multi_args.jsonl, "Write per-seed rows as JSONL here");
  multi->add_option("--iterations", multi_args.iterations, "Augment-retrain rounds")
      ->capture_default_str();
  multi->add_option("--candidates", multi_args.candidates, "Completions per sentence")
      ->capture_default_str();
  multi->add_flag("--accumulate", multi_args.accumulate,
                  "Keep all iterations' samples in the training mix");
  multi->add_flag("--no-augment-negatives", multi_args.no_negatives,
                  "Augment only simile sentences");
  multi->add_option("--alpha", multi_args.alpha, "EDA edit fraction")
      ->capture_default_str();
  multi->add_option("--synonyms", multi_args.synonyms, "Synonym table file (EDA)");
  multi->add_option("--dataset-name", multi_args.dataset_name,
                    "Label for the report (defaults to the test path)");
  multi_train.attach(multi);
  multi_gen.attach(multi);
  multi_sel.attach(multi);
  multi_lex.attach(multi);
  multi->callback([&] {
    echo_config(multi, out);
    const auto train_ds = load_dataset(multi_args.data);
    const auto test_ds = load_dataset(multi_args.test);

    ExperimentConfig cfg;
    cfg.method = parse_method(multi_args.method);
    cfg.train = multi_train.cfg;
    cfg.iwas.iterations = multi_args.iterations;
    cfg.iwas.candidates_per_sentence = multi_args.candidates;
    cfg.iwas.accumulation =
        multi_args.accumulate ? Accumulation::Accumulate : Accumulation::Replace;
    cfg.iwas.augment_negatives = !multi_args.no_negatives;
    cfg.iwas.generator = multi_gen.cfg;
    cfg.iwas.selection = multi_sel.cfg;
    cfg.iwas.lexicon = multi_lex.resolve();
    cfg.iwas.allow_circumfix = multi_lex.allow_circumfix;
    cfg.eda.alpha = multi_args.alpha;
    if (!multi_args.synonyms.empty()) {
      cfg.eda.synonym_table = load_synonym_table(multi_args.synonyms);
    }
    cfg.dataset_name =
        multi_args.dataset_name.empty() ? multi_args.test : multi_args.dataset_name;

    const auto report = multiseed_run(cfg, train_ds, test_ds, multi_args.seeds);

    out << "method: " << report.method << "  dataset: " << report.dataset_name << '\n';
    out << std::fixed << std::setprecision(4);
    out << "seed      accuracy  precision  recall    f1\n";
    for (const auto& row : report.rows) {
      out << std::left << std::setw(10) << row.seed << std::setw(10)
          << row.metrics.accuracy << std::setw(11) << row.metrics.precision
          << std::setw(10) << row.metrics.recall << row.metrics.f1 << '\n';
    }
    out << std::left << std::setw(10) << "mean" << std::setw(10) << report.mean.accuracy
        << std::setw(11) << report.mean.precision << std::setw(10) << report.mean.recall
        << report.mean.f1 << '\n';
    out.unsetf(std::ios::fixed);
    out << std::setprecision(6);

    if (!multi_args.jsonl.empty()) {
      std::ofstream rows(multi_args.jsonl, std::ios::binary | std::ios::trunc);
      if (!rows) {
        throw std::runtime_error("cannot open '" + multi_args.jsonl + "' for writing");
      }
      for (const auto& row : report.rows) {
        rows << row_json(std::to_string(row.seed), row.metrics).dump() << '\n';
      }
      rows << row_json("mean", report.mean).dump() << '\n';
      out << "wrote: " << multi_args.jsonl << '\n';
    }
  });

  std::reverse(args.begin(), args.end());
  try {
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace iwas
