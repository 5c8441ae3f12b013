#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "iwas/corpus.hpp"
#include "iwas/http.hpp"

namespace iwas {

// The sentence prefix ending exactly at cw_span.end, fed to a language
// model for completion.
struct Prompt {
  std::string text;
  std::string source_id;
  std::uint32_t cw_end = 0;  // scalar-value offset where truncation occurred

  bool operator==(const Prompt&) const = default;
};

struct GenerationRequest {
  Prompt prompt;
  std::uint32_t n = 10;
  std::uint32_t top_k = 40;
  std::uint32_t max_new_tokens = 50;
  std::uint64_t seed = 0;
};

struct Candidate {
  std::string full_text;    // prompt text + completion
  std::string completion;
  std::uint32_t index = 0;  // ordinal within the batch

  bool operator==(const Candidate&) const = default;
};

// A completion model. Implementations must tolerate concurrent generate()
// calls; deterministic backends return identical lists for identical
// requests regardless of interleaving.
class GeneratorBackend {
 public:
  virtual ~GeneratorBackend() = default;
  virtual std::vector<Candidate> generate(const GenerationRequest& req) const = 0;
  virtual std::string name() const = 0;
};

// Prompt = s.text[0 .. cw_span.end). Throws if cw_span is absent.
Prompt build_prompt(const LabeledSentence& s);

// Calls the backend and enforces its contract: exactly req.n candidates,
// indices 0..n-1, every full_text prefixed by the prompt. Errors carry the
// source id.
std::vector<Candidate> generate_candidates(const GeneratorBackend& backend,
                                           const GenerationRequest& req);

// Deterministic stand-in for a real language model. Each completion is a
// vehicle phrase drawn from a built-in vocabulary by an index-salted FNV
// hash of (prompt text, seed), followed by a fixed template tail, so
// completions are pairwise distinct whenever the vocabulary is at least as
// large as n. Generation units are Unicode scalar values.
class MockGenerator : public GeneratorBackend {
 public:
  explicit MockGenerator(bool truncate_at_sentence_end = true)
      : truncate_at_sentence_end_(truncate_at_sentence_end) {}
  std::vector<Candidate> generate(const GenerationRequest& req) const override;
  std::string name() const override { return "mock"; }

  static const std::vector<std::string>& vehicle_vocabulary();

 private:
  bool truncate_at_sentence_end_;
};

// Client for a completion server speaking the wire contract
//   POST {"prompt","n","top_k","max_tokens","seed"}
//   ->   {"choices":[{"text": completion}, ...]} with exactly n elements.
class HttpGenerator : public GeneratorBackend {
 public:
  explicit HttpGenerator(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {}
  std::vector<Candidate> generate(const GenerationRequest& req) const override;
  std::string name() const override { return "http"; }

 private:
  HttpEndpoint endpoint_;
};

}  // namespace iwas
