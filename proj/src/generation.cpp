#include "iwas/generation.hpp"

#include <stdexcept>

#include "iwas/hash.hpp"
#include "iwas/utf8.hpp"

namespace iwas {

Prompt build_prompt(const LabeledSentence& s) {
  if (!s.cw_span) {
    throw std::runtime_error("build_prompt: record '" + s.id +
                             "' has no comparative-word span");
  }
  Prompt p;
  p.text = utf8::substr(s.text, 0, s.cw_span->end);
  p.source_id = s.id;
  p.cw_end = s.cw_span->end;
  return p;
}

std::vector<Candidate> generate_candidates(const GeneratorBackend& backend,
                                           const GenerationRequest& req) {
  if (req.n < 1) throw std::invalid_argument("generation request needs n >= 1");
  if (req.max_new_tokens < 1) {
    throw std::invalid_argument("generation request needs max_new_tokens >= 1");
  }

  std::vector<Candidate> cands;
  try {
    cands = backend.generate(req);
  } catch (const std::exception& e) {
    throw std::runtime_error("backend '" + backend.name() + "' failed for source '" +
                             req.prompt.source_id + "': " + e.what());
  }
  if (cands.size() != req.n) {
    throw std::runtime_error("candidate count mismatch: backend '" + backend.name() +
                             "' returned " + std::to_string(cands.size()) + " of " +
                             std::to_string(req.n) + " for source '" +
                             req.prompt.source_id + "'");
  }
  for (std::size_t i = 0; i < cands.size(); ++i) {
    if (cands[i].index != i) {
      throw std::runtime_error("candidate index mismatch at position " +
                               std::to_string(i) + " from backend '" + backend.name() +
                               "'");
    }
    if (cands[i].full_text.rfind(req.prompt.text, 0) != 0 ||
        cands[i].full_text != req.prompt.text + cands[i].completion) {
      throw std::runtime_error("candidate " + std::to_string(i) + " from backend '" +
                               backend.name() + "' is not prompt + completion");
    }
  }
  return cands;
}

const std::vector<std::string>& MockGenerator::vehicle_vocabulary() {
  static const std::vector<std::string> vocab = {
      "火炉", "白云", "珍珠", "细雨", "大山", "星星", "海洋", "镜子", "棉花", "钻石",
      "瀑布", "灯笼", "绸缎", "利箭", "花朵", "雪花", "音乐", "彩虹", "猛虎", "画卷",
  };
  return vocab;
}

std::vector<Candidate> MockGenerator::generate(const GenerationRequest& req) const {
  const auto& vocab = vehicle_vocabulary();
  const std::uint64_t base =
      Fnv1a64().bytes(req.prompt.text).u64(req.seed).value();

  std::vector<Candidate> out;
  out.reserve(req.n);
  for (std::uint32_t i = 0; i < req.n; ++i) {
    // Index-salted draw: consecutive indices land on distinct vocabulary
    // slots as long as the vocabulary holds at least n entries.
    const std::string& vehicle = vocab[(base + i) % vocab.size()];
    std::string completion = vehicle + "一般。";

    auto cps = utf8::decode(completion);
    if (truncate_at_sentence_end_) {
      for (std::size_t k = 0; k < cps.size(); ++k) {
        if (cps[k] == U'。' || cps[k] == U'！' || cps[k] == U'？') {
          cps.resize(k + 1);
          break;
        }
      }
    }
    if (cps.size() > req.max_new_tokens) cps.resize(req.max_new_tokens);
    completion = utf8::encode(cps);

    out.push_back({req.prompt.text + completion, completion, i});
  }
  return out;
}

std::vector<Candidate> HttpGenerator::generate(const GenerationRequest& req) const {
  const nlohmann::json body = {
      {"prompt", req.prompt.text}, {"n", req.n},       {"top_k", req.top_k},
      {"max_tokens", req.max_new_tokens},              {"seed", req.seed},
  };
  const std::string context = "generator request for source '" + req.prompt.source_id + "'";
  const nlohmann::json resp = http_post_json(endpoint_, body, context);

  if (!resp.is_object() || !resp.contains("choices") || !resp["choices"].is_array()) {
    throw std::runtime_error(context + ": schema error: missing 'choices' array");
  }
  const auto& choices = resp["choices"];
  if (choices.size() != req.n) {
    throw std::runtime_error(context + ": schema error: expected " +
                             std::to_string(req.n) + " choices, got " +
                             std::to_string(choices.size()));
  }
  std::vector<Candidate> out;
  out.reserve(choices.size());
  for (std::size_t i = 0; i < choices.size(); ++i) {
    if (!choices[i].is_object() || !choices[i].contains("text") ||
        !choices[i]["text"].is_string()) {
      throw std::runtime_error(context + ": schema error: choice " + std::to_string(i) +
                               " lacks a string 'text'");
    }
    const auto completion = choices[i]["text"].get<std::string>();
    out.push_back({req.prompt.text + completion, completion,
                   static_cast<std::uint32_t>(i)});
  }
  return out;
}

}  // namespace iwas
