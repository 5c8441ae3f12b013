#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace iwas {

// Half-open [begin, end) range in Unicode scalar values, not bytes.
struct Span {
  std::uint32_t begin = 0;
  std::uint32_t end = 0;

  std::uint32_t size() const { return end - begin; }
  bool operator==(const Span&) const = default;
};

// One corpus record: a sentence with optional TOPIC / comparative-word /
// VEHICLE annotations and a binary simile label (1 = simile).
struct LabeledSentence {
  std::string id;
  std::string text;
  std::optional<Span> topic_span;
  std::optional<Span> cw_span;
  std::optional<Span> vehicle_span;
  int label = 0;
  // Unknown JSONL fields, kept verbatim so datasets round-trip.
  nlohmann::json extra = nlohmann::json::object();

  bool operator==(const LabeledSentence&) const = default;
};

struct DatasetSplit {
  std::vector<LabeledSentence> train;
  std::vector<LabeledSentence> test;
  std::string name;
};

struct CorpusStats {
  std::size_t n_sentences = 0;
  std::size_t n_simile = 0;
  std::size_t n_non_simile = 0;
  std::size_t n_tokens = 0;  // scalar values, whitespace excluded
  std::map<std::string, std::size_t> cw_histogram;
};

enum class DatasetFormat { Jsonl };

// Returns human-readable invariant violations; empty means the record is
// valid. Violations are data, not errors.
std::vector<std::string> validate_record(const LabeledSentence& s);

// Throws std::runtime_error naming the first offending record if any
// invariant is violated or ids repeat.
void validate_dataset(const std::vector<LabeledSentence>& ds);

// JSONL, one record per line. Errors carry the 1-based line number.
std::vector<LabeledSentence> load_dataset(const std::string& path,
                                          DatasetFormat format = DatasetFormat::Jsonl);
void write_dataset(const std::vector<LabeledSentence>& ds, const std::string& path);

// Single-record (de)serialization, shared with the manifest tooling.
nlohmann::json record_to_json(const LabeledSentence& s);
LabeledSentence record_from_json(const nlohmann::json& j);

CorpusStats corpus_stats(const std::vector<LabeledSentence>& ds);

// Deterministic seeded partition; test side holds round(|ds| * test_fraction)
// records. Both sides keep the input order.
DatasetSplit split_dataset(const std::vector<LabeledSentence>& ds, double test_fraction,
                           std::uint64_t seed, const std::string& name = "");

}  // namespace iwas
