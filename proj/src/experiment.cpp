#include "iwas/experiment.hpp"

#include <stdexcept>
#include <unordered_set>

#include "iwas/hash.hpp"

namespace iwas {

namespace {

std::uint64_t sentence_seed(std::uint64_t run_seed, const std::string& id) {
  return Fnv1a64().bytes("exp").u64(run_seed).bytes(id).value();
}

void append_checked(std::vector<LabeledSentence>& out,
                    std::unordered_set<std::string>& ids, LabeledSentence s) {
  if (!ids.insert(s.id).second) {
    throw std::runtime_error("id collision on '" + s.id + "'");
  }
  out.push_back(std::move(s));
}

std::unordered_set<std::string> id_set(const std::vector<LabeledSentence>& ds) {
  std::unordered_set<std::string> ids;
  for (const auto& s : ds) ids.insert(s.id);
  return ids;
}

}  // namespace

std::string method_name(AugmentMethod m) {
  switch (m) {
    case AugmentMethod::None: return "none";
    case AugmentMethod::Iwas: return "iwas";
    case AugmentMethod::Eda: return "eda";
    case AugmentMethod::WoSc: return "wo-sc";
    case AugmentMethod::WoWr: return "wo-wr";
  }
  throw std::logic_error("unreachable");
}

AugmentMethod parse_method(const std::string& name) {
  if (name == "none") return AugmentMethod::None;
  if (name == "iwas") return AugmentMethod::Iwas;
  if (name == "eda") return AugmentMethod::Eda;
  if (name == "wo-sc") return AugmentMethod::WoSc;
  if (name == "wo-wr") return AugmentMethod::WoWr;
  throw std::invalid_argument("unknown augmentation method '" + name +
                              "' (expected none|iwas|eda|wo-sc|wo-wr)");
}

Metrics run_single_seed(const ExperimentConfig& cfg,
                        const std::vector<LabeledSentence>& train,
                        const std::vector<LabeledSentence>& test, std::uint64_t seed) {
  validate_dataset(train);
  TrainConfig train_cfg = cfg.train;
  train_cfg.seed = seed;

  ScorerModel model;
  switch (cfg.method) {
    case AugmentMethod::None: {
      model = train_classifier(train, train_cfg);
      break;
    }
    case AugmentMethod::Iwas: {
      IwasConfig iwas_cfg = cfg.iwas;
      iwas_cfg.scorer.kind = "builtin";
      iwas_cfg.scorer.train = cfg.train;
      iwas_cfg.seed = seed;
      auto result = run_iwas(train, iwas_cfg);
      model = std::move(*result.model);
      break;
    }
    case AugmentMethod::Eda: {
      auto merged = train;
      auto ids = id_set(train);
      EdaConfig eda_cfg = cfg.eda;
      for (const auto& s : train) {
        eda_cfg.seed = sentence_seed(seed, s.id);
        auto aug = eda_augment(s, eda_cfg);
        aug.id = s.id + "#eda";
        append_checked(merged, ids, std::move(aug));
      }
      model = train_classifier(merged, train_cfg);
      break;
    }
    case AugmentMethod::WoSc: {
      auto merged = train;
      auto ids = id_set(train);
      for (const auto& s : train) {
        if (s.label != 1 || !s.cw_span) continue;
        auto aug = was_wo_sc(s, cfg.iwas.lexicon, sentence_seed(seed, s.id));
        aug.id = s.id + "#wosc";
        append_checked(merged, ids, std::move(aug));
      }
      model = train_classifier(merged, train_cfg);
      break;
    }
    case AugmentMethod::WoWr: {
      ScorerModel basic = train_classifier(train, train_cfg);
      const ModelScorer scorer(basic);
      const auto backend = make_generator(cfg.iwas.generator);
      auto merged = train;
      auto ids = id_set(train);
      for (const auto& s : train) {
        if (s.label != 1 || !s.cw_span) continue;
        const auto sample =
            was_wo_wr(s, *backend, scorer, sentence_seed(seed, s.id),
                      cfg.iwas.candidates_per_sentence, cfg.iwas.selection);
        LabeledSentence rec;
        rec.id = s.id + "#wowr";
        rec.text = sample.text;
        rec.label = sample.label;
        append_checked(merged, ids, std::move(rec));
      }
      model = train_classifier(merged, train_cfg, &basic);
      break;
    }
  }

  const ModelScorer final_scorer(std::move(model));
  return metrics(confusion(final_scorer, test));
}

EvalReport multiseed_run(const ExperimentConfig& cfg,
                         const std::vector<LabeledSentence>& train,
                         const std::vector<LabeledSentence>& test,
                         const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) throw std::invalid_argument("seed list is empty");
  EvalReport report;
  report.dataset_name = cfg.dataset_name;
  report.method = method_name(cfg.method);
  for (const auto seed : seeds) {
    try {
      report.rows.push_back({seed, run_single_seed(cfg, train, test, seed)});
    } catch (const std::exception& e) {
      throw std::runtime_error("seed " + std::to_string(seed) + ": " + e.what());
    }
  }
  const auto n = static_cast<double>(report.rows.size());
  for (const auto& row : report.rows) {
    report.mean.accuracy += row.metrics.accuracy / n;
    report.mean.precision += row.metrics.precision / n;
    report.mean.recall += row.metrics.recall / n;
    report.mean.f1 += row.metrics.f1 / n;
  }
  return report;
}

}  // namespace iwas
