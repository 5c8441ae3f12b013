#include "iwas/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include "iwas/hash.hpp"
#include "iwas/utf8.hpp"

namespace iwas {

namespace {

std::vector<std::string> to_units(const std::string& text) {
  std::vector<std::string> units;
  for (char32_t cp : utf8::decode(text)) {
    std::string u;
    utf8::append(u, cp);
    units.push_back(std::move(u));
  }
  return units;
}

std::string join(const std::vector<std::string>& units) {
  std::string out;
  for (const auto& u : units) out += u;
  return out;
}

std::size_t op_count(double alpha, std::size_t n) {
  return static_cast<std::size_t>(std::ceil(alpha * static_cast<double>(n)));
}

// Matchable 1-2-unit windows, greedy longest-first, non-overlapping.
struct SynonymSite {
  std::size_t pos;
  std::size_t len;
  const std::vector<std::string>* synonyms;
};

std::vector<SynonymSite> find_sites(const std::vector<std::string>& units,
                                    const SynonymTable& table) {
  std::vector<SynonymSite> sites;
  std::size_t i = 0;
  while (i < units.size()) {
    bool matched = false;
    for (std::size_t len = 2; len >= 1; --len) {
      if (i + len > units.size()) continue;
      std::string window = units[i];
      if (len == 2) window += units[i + 1];
      const auto it = table.find(window);
      if (it != table.end() && !it->second.empty()) {
        sites.push_back({i, len, &it->second});
        i += len;
        matched = true;
        break;
      }
      if (len == 1) break;
    }
    if (!matched) ++i;
  }
  return sites;
}

void synonym_replacement(std::vector<std::string>& units, const EdaConfig& cfg,
                         std::mt19937_64& rng) {
  auto sites = find_sites(units, cfg.synonym_table);
  if (sites.empty()) return;  // nothing the table knows; text unchanged
  std::vector<std::size_t> order(sites.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  seeded_shuffle(order, rng);
  const std::size_t k = std::min(op_count(cfg.alpha, units.size()), sites.size());
  std::vector<std::size_t> chosen(order.begin(), order.begin() + static_cast<long>(k));
  std::sort(chosen.begin(), chosen.end());
  // Rebuild back-to-front so earlier positions stay valid.
  for (auto it = chosen.rbegin(); it != chosen.rend(); ++it) {
    const auto& site = sites[*it];
    const auto& syn = (*site.synonyms)[rng() % site.synonyms->size()];
    auto replacement = to_units(syn);
    units.erase(units.begin() + static_cast<long>(site.pos),
                units.begin() + static_cast<long>(site.pos + site.len));
    units.insert(units.begin() + static_cast<long>(site.pos), replacement.begin(),
                 replacement.end());
  }
}

void random_swap(std::vector<std::string>& units, const EdaConfig& cfg,
                 std::mt19937_64& rng) {
  const std::size_t n = units.size();
  if (n < 2) return;
  const std::size_t k = op_count(cfg.alpha, n);
  for (std::size_t s = 0; s < k; ++s) {
    const std::size_t i = rng() % n;
    std::size_t j = rng() % (n - 1);
    if (j >= i) ++j;
    std::swap(units[i], units[j]);
  }
}

void random_insertion(std::vector<std::string>& units, const EdaConfig& cfg,
                      std::mt19937_64& rng) {
  const std::size_t k = op_count(cfg.alpha, units.size());
  for (std::size_t s = 0; s < k; ++s) {
    const std::string& src = units[rng() % units.size()];
    std::string inserted = src;
    const auto it = cfg.synonym_table.find(src);
    if (it != cfg.synonym_table.end() && !it->second.empty()) {
      inserted = it->second[rng() % it->second.size()];
    }
    const std::size_t pos = rng() % (units.size() + 1);
    auto expansion = to_units(inserted);
    units.insert(units.begin() + static_cast<long>(pos), expansion.begin(),
                 expansion.end());
  }
}

void random_deletion(std::vector<std::string>& units, const EdaConfig& cfg,
                     std::mt19937_64& rng) {
  const std::size_t n = units.size();
  const std::size_t k = std::min(op_count(cfg.alpha, n), n - 1);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  seeded_shuffle(order, rng);
  std::vector<bool> removed(n, false);
  for (std::size_t i = 0; i < k; ++i) removed[order[i]] = true;
  std::vector<std::string> kept;
  kept.reserve(n - k);
  for (std::size_t i = 0; i < n; ++i) {
    if (!removed[i]) kept.push_back(std::move(units[i]));
  }
  units = std::move(kept);
}

}  // namespace

SynonymTable default_synonym_table() {
  return {
      {"天气", {"气候"}},
      {"美丽", {"漂亮", "秀丽"}},
      {"快乐", {"开心", "高兴"}},
      {"月亮", {"明月"}},
      {"孩子", {"小孩", "儿童"}},
      {"非常", {"十分", "格外"}},
      {"安静", {"宁静"}},
      {"温柔", {"温和"}},
      {"寒冷", {"冰冷"}},
      {"炎热", {"酷热"}},
  };
}

SynonymTable load_synonym_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open synonym table '" + path + "'");
  SynonymTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                               ": expected word<TAB>syn1,syn2,...");
    }
    const std::string word = line.substr(0, tab);
    std::vector<std::string> syns;
    std::size_t start = tab + 1;
    while (start <= line.size()) {
      const auto comma = line.find(',', start);
      const auto end = comma == std::string::npos ? line.size() : comma;
      if (end > start) syns.push_back(line.substr(start, end - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (syns.empty()) {
      throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                               ": no synonyms for '" + word + "'");
    }
    table[word] = std::move(syns);
  }
  return table;
}

LabeledSentence eda_augment(const LabeledSentence& s, const EdaConfig& cfg) {
  if (s.text.empty()) throw std::invalid_argument("cannot augment empty text");
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) {
    throw std::invalid_argument("alpha must be in (0,1)");
  }
  auto units = to_units(s.text);
  std::mt19937_64 rng(cfg.seed);
  switch (rng() % 4) {
    case 0: synonym_replacement(units, cfg, rng); break;
    case 1: random_swap(units, cfg, rng); break;
    case 2: random_insertion(units, cfg, rng); break;
    default: random_deletion(units, cfg, rng); break;
  }
  LabeledSentence out;
  out.id = s.id;
  out.text = join(units);
  out.label = s.label;
  out.extra = s.extra;
  return out;
}

LabeledSentence was_wo_sc(const LabeledSentence& s, const Lexicon& lex, std::uint64_t seed) {
  return replace_comparative(s, lex, seed);
}

AugmentedSample was_wo_wr(const LabeledSentence& s, const GeneratorBackend& backend,
                          const Scorer& scorer, std::uint64_t seed,
                          std::uint32_t candidates, const SelectionConfig& selection) {
  GenerationRequest req;
  req.prompt = build_prompt(s);  // comparative left as-is
  req.n = candidates;
  req.seed = seed;
  const auto cands = generate_candidates(backend, req);

  std::vector<std::string> texts;
  texts.reserve(cands.size());
  for (const auto& c : cands) texts.push_back(c.full_text);
  const auto probs = scorer.score_batch(texts);
  if (probs.size() != cands.size()) {
    throw std::runtime_error("scorer returned " + std::to_string(probs.size()) +
                             " probabilities for " + std::to_string(cands.size()) +
                             " candidates (source '" + s.id + "')");
  }

  std::vector<ScoredCandidate> scored;
  scored.reserve(cands.size());
  for (std::size_t i = 0; i < cands.size(); ++i) scored.push_back({cands[i], probs[i]});
  auto sample = select_augmented(s.label, scored, selection.threshold, selection.policy);
  sample.source_id = s.id;
  sample.iteration = 1;
  return sample;
}

}  // namespace iwas
