#include "iwas/lexicon.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <stdexcept>
#include <unordered_set>

#include "iwas/hash.hpp"
#include "iwas/utf8.hpp"

namespace iwas {

void validate_lexicon(const Lexicon& lex) {
  if (lex.entries.empty()) throw std::runtime_error("lexicon has no entries");
  std::unordered_set<std::string> prefixes;
  for (const auto& e : lex.entries) {
    if (e.prefix.empty()) throw std::runtime_error("lexicon entry with empty prefix");
    if (!prefixes.insert(e.prefix).second) {
      throw std::runtime_error("duplicate lexicon prefix '" + e.prefix + "'");
    }
  }
}

Lexicon default_lexicon() {
  return Lexicon{{
      {"像", "", "like"},
      {"宛如", "", "similar to"},
      {"好似", "", "seem"},
      {"仿佛", "", "as if"},
      {"如同", "", "as...as"},
      {"跟", "一样", "same as"},
      {"好比", "", "just like"},
  }};
}

Lexicon load_lexicon(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open lexicon '" + path + "'");
  Lexicon lex;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t1 == std::string::npos || t2 == std::string::npos) {
      throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                               ": expected prefix<TAB>suffix<TAB>gloss");
    }
    lex.entries.push_back({line.substr(0, t1), line.substr(t1 + 1, t2 - t1 - 1),
                           line.substr(t2 + 1)});
  }
  validate_lexicon(lex);
  return lex;
}

LabeledSentence replace_comparative(const LabeledSentence& s, const Lexicon& lex,
                                    std::uint64_t seed, bool allow_circumfix) {
  if (!s.cw_span) {
    throw std::runtime_error("replace_comparative: record '" + s.id +
                             "' has no comparative-word span");
  }
  validate_lexicon(lex);
  const Span cw = *s.cw_span;
  const std::string current = utf8::substr(s.text, cw.begin, cw.end);

  std::vector<const ComparativeEntry*> pool;
  for (const auto& e : lex.entries) {
    if (e.prefix == current) continue;
    if (e.circumfix() && !allow_circumfix) continue;
    pool.push_back(&e);
  }
  if (pool.empty()) {
    throw std::runtime_error("replace_comparative: empty replacement pool for '" +
                             current + "'");
  }

  std::mt19937_64 rng(seed);
  const ComparativeEntry& pick = *pool[rng() % pool.size()];
  const auto pick_len = static_cast<std::uint32_t>(utf8::length(pick.prefix));

  const std::size_t byte_begin = utf8::byte_offset(s.text, cw.begin);
  const std::size_t byte_end = utf8::byte_offset(s.text, cw.end);
  LabeledSentence out = s;
  out.text = s.text.substr(0, byte_begin) + pick.prefix + s.text.substr(byte_end);
  out.cw_span = Span{cw.begin, cw.begin + pick_len};

  const std::int64_t delta =
      static_cast<std::int64_t>(pick_len) - static_cast<std::int64_t>(cw.size());
  const auto shift = [&](std::optional<Span>& span) {
    if (span && span->begin >= cw.end) {
      span->begin = static_cast<std::uint32_t>(span->begin + delta);
      span->end = static_cast<std::uint32_t>(span->end + delta);
    }
  };
  shift(out.topic_span);
  shift(out.vehicle_span);
  return out;
}

std::optional<Span> find_comparative(const std::string& text, const Lexicon& lex) {
  std::vector<std::vector<char32_t>> surfaces;
  for (const auto& e : lex.entries) {
    surfaces.push_back(utf8::decode(e.prefix));
    if (e.circumfix()) surfaces.push_back(utf8::decode(e.suffix));
  }
  std::sort(surfaces.begin(), surfaces.end(),
            [](const auto& a, const auto& b) { return a.size() > b.size(); });

  const auto cps = utf8::decode(text);
  for (std::size_t pos = 0; pos < cps.size(); ++pos) {
    for (const auto& surface : surfaces) {
      if (pos + surface.size() > cps.size()) continue;
      if (std::equal(surface.begin(), surface.end(), cps.begin() + static_cast<long>(pos))) {
        return Span{static_cast<std::uint32_t>(pos),
                    static_cast<std::uint32_t>(pos + surface.size())};
      }
    }
  }
  return std::nullopt;
}

}  // namespace iwas
