#include "iwas/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>
#include <unordered_set>

#include "iwas/hash.hpp"
#include "iwas/utf8.hpp"

namespace iwas {

namespace {

using nlohmann::json;

struct NamedSpan {
  const char* name;
  const std::optional<Span>& span;
};

bool overlap(const Span& a, const Span& b) {
  return a.begin < b.end && b.begin < a.end;
}

std::string span_str(const Span& s) {
  return "[" + std::to_string(s.begin) + "," + std::to_string(s.end) + ")";
}

std::optional<Span> parse_span(const json& j, const char* field) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() ||
      !j[1].is_number_integer() || j[0].get<std::int64_t>() < 0 ||
      j[1].get<std::int64_t>() < 0) {
    throw std::runtime_error(std::string(field) +
                             " must be a [start, end] pair of non-negative integers");
  }
  return Span{j[0].get<std::uint32_t>(), j[1].get<std::uint32_t>()};
}

}  // namespace

std::vector<std::string> validate_record(const LabeledSentence& s) {
  std::vector<std::string> out;
  if (s.label != 0 && s.label != 1) out.push_back("label must be 0 or 1");

  const std::size_t len = utf8::length(s.text);
  const NamedSpan spans[] = {
      {"topic", s.topic_span}, {"cw", s.cw_span}, {"vehicle", s.vehicle_span}};
  for (const auto& [name, span] : spans) {
    if (!span) continue;
    if (span->begin >= span->end || span->end > len) {
      out.push_back(std::string(name) + " span " + span_str(*span) +
                    " invalid for text of length " + std::to_string(len));
    }
  }
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = i + 1; j < 3; ++j) {
      if (spans[i].span && spans[j].span && overlap(*spans[i].span, *spans[j].span)) {
        out.push_back(std::string("overlapping spans (") + spans[i].name + ", " +
                      spans[j].name + ")");
      }
    }
  }
  if (s.label == 1 && !s.cw_span) out.push_back("simile lacks comparative word");
  return out;
}

void validate_dataset(const std::vector<LabeledSentence>& ds) {
  std::unordered_set<std::string> seen;
  for (const auto& s : ds) {
    if (!seen.insert(s.id).second) {
      throw std::runtime_error("duplicate id '" + s.id + "'");
    }
    const auto violations = validate_record(s);
    if (!violations.empty()) {
      throw std::runtime_error("record '" + s.id + "': " + violations.front());
    }
  }
}

LabeledSentence record_from_json(const json& j) {
  if (!j.is_object()) throw std::runtime_error("record must be a JSON object");
  LabeledSentence s;
  for (const auto& [key, value] : j.items()) {
    if (key == "id") {
      if (!value.is_string()) throw std::runtime_error("id must be a string");
      s.id = value.get<std::string>();
    } else if (key == "text") {
      if (!value.is_string()) throw std::runtime_error("text must be a string");
      s.text = value.get<std::string>();
    } else if (key == "label") {
      if (!value.is_number_integer()) throw std::runtime_error("label must be 0 or 1");
      s.label = value.get<int>();
    } else if (key == "topic") {
      s.topic_span = parse_span(value, "topic");
    } else if (key == "cw") {
      s.cw_span = parse_span(value, "cw");
    } else if (key == "vehicle") {
      s.vehicle_span = parse_span(value, "vehicle");
    } else {
      s.extra[key] = value;
    }
  }
  if (!j.contains("id")) throw std::runtime_error("missing field 'id'");
  if (!j.contains("text")) throw std::runtime_error("missing field 'text'");
  if (!j.contains("label")) throw std::runtime_error("missing field 'label'");
  return s;
}

nlohmann::json record_to_json(const LabeledSentence& s) {
  json j;
  j["id"] = s.id;
  j["text"] = s.text;
  j["label"] = s.label;
  if (s.topic_span) j["topic"] = {s.topic_span->begin, s.topic_span->end};
  if (s.cw_span) j["cw"] = {s.cw_span->begin, s.cw_span->end};
  if (s.vehicle_span) j["vehicle"] = {s.vehicle_span->begin, s.vehicle_span->end};
  for (const auto& [key, value] : s.extra.items()) {
    if (!j.contains(key)) j[key] = value;
  }
  return j;
}

std::vector<LabeledSentence> load_dataset(const std::string& path, DatasetFormat) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");

  std::vector<LabeledSentence> out;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path + ": line " + std::to_string(line_no);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw std::runtime_error(where + ": malformed JSON: " + e.what());
    }
    LabeledSentence s;
    try {
      s = record_from_json(j);
    } catch (const std::exception& e) {
      throw std::runtime_error(where + ": " + e.what());
    }
    if (!ids.insert(s.id).second) {
      throw std::runtime_error(where + ": duplicate id '" + s.id + "'");
    }
    const auto violations = validate_record(s);
    if (!violations.empty()) {
      throw std::runtime_error(where + ": " + violations.front());
    }
    out.push_back(std::move(s));
  }
  if (in.bad()) throw std::runtime_error("I/O error reading '" + path + "'");
  return out;
}

void write_dataset(const std::vector<LabeledSentence>& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  for (const auto& s : ds) {
    out << record_to_json(s).dump() << '\n';
  }
  out.flush();
  if (!out.good()) throw std::runtime_error("I/O error writing '" + path + "'");
}

CorpusStats corpus_stats(const std::vector<LabeledSentence>& ds) {
  CorpusStats st;
  st.n_sentences = ds.size();
  for (const auto& s : ds) {
    if (s.label == 1) {
      ++st.n_simile;
    } else {
      ++st.n_non_simile;
    }
    for (char32_t cp : utf8::decode(s.text)) {
      if (!utf8::is_space(cp)) ++st.n_tokens;
    }
    if (s.cw_span) {
      ++st.cw_histogram[utf8::substr(s.text, s.cw_span->begin, s.cw_span->end)];
    }
  }
  return st;
}

DatasetSplit split_dataset(const std::vector<LabeledSentence>& ds, double test_fraction,
                           std::uint64_t seed, const std::string& name) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw std::invalid_argument("test_fraction must be in (0,1), got " +
                                std::to_string(test_fraction));
  }
  if (ds.size() < 2) throw std::invalid_argument("need at least 2 records to split");
  {
    std::unordered_set<std::string> ids;
    for (const auto& s : ds) {
      if (!ids.insert(s.id).second) {
        throw std::runtime_error("duplicate id '" + s.id + "' in split input");
      }
    }
  }

  std::vector<std::size_t> order(ds.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  seeded_shuffle(order, rng);

  const auto n_test = static_cast<std::size_t>(
      std::llround(test_fraction * static_cast<double>(ds.size())));
  std::vector<bool> in_test(ds.size(), false);
  for (std::size_t i = 0; i < n_test && i < order.size(); ++i) in_test[order[i]] = true;

  DatasetSplit split;
  split.name = name;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    (in_test[i] ? split.test : split.train).push_back(ds[i]);
  }
  return split;
}

}  // namespace iwas
