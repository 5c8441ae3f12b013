#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "fixtures.hpp"
#include "iwas/hash.hpp"
#include "iwas/pipeline.hpp"

using namespace iwas;

namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "iwas-tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string file_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

// Deterministic text-hash probabilities; no training involved.
class StubScorer : public Scorer {
 public:
  double score(const std::string& text) const override {
    return static_cast<double>(fnv1a64(text) % 1000) / 999.0;
  }
};

// Mock-backed generator that throws on the k-th generate call.
class FailingBackend : public GeneratorBackend {
 public:
  explicit FailingBackend(std::size_t fail_at) : fail_at_(fail_at) {}
  std::vector<Candidate> generate(const GenerationRequest& req) const override {
    if (calls_.fetch_add(1) == fail_at_) {
      throw std::runtime_error("backend exploded");
    }
    return mock_.generate(req);
  }
  std::string name() const override { return "failing"; }

 private:
  MockGenerator mock_;
  mutable std::atomic<std::size_t> calls_{0};
  std::size_t fail_at_;
};

IwasConfig mock_config() {
  IwasConfig cfg;
  cfg.scorer.train.learning_rate = 0.5;
  cfg.scorer.train.batch_size = 16;
  cfg.scorer.train.max_epochs = 5;
  cfg.seed = 16;
  return cfg;
}

}  // namespace

TEST_CASE("config hashes are stable and sensitive") {
  const auto cfg = mock_config();
  CHECK(config_hash(cfg) == config_hash(cfg));
  CHECK(config_hash(cfg).size() == 16);

  auto other = cfg;
  other.seed = 17;
  CHECK(config_hash(other) != config_hash(cfg));
  other = cfg;
  other.selection.threshold = 0.6;
  CHECK(config_hash(other) != config_hash(cfg));
  other = cfg;
  other.lexicon.entries.pop_back();
  CHECK(config_hash(other) != config_hash(cfg));
}

TEST_CASE("make_generator resolves backend kinds") {
  GeneratorConfig cfg;
  CHECK(make_generator(cfg)->name() == "mock");
  cfg.kind = "http";
  CHECK_THROWS_WITH_AS((void)make_generator(cfg), doctest::Contains("endpoint URL"),
                       std::runtime_error);
  cfg.endpoint.url = "http://127.0.0.1:1";
  CHECK(make_generator(cfg)->name() == "http");
  cfg.kind = "gpt";
  CHECK_THROWS_WITH_AS((void)make_generator(cfg),
                       doctest::Contains("unknown generator kind 'gpt'"),
                       std::runtime_error);
}

TEST_CASE("one iteration yields one sample per eligible sentence, in order") {
  const auto train = fixtures::all_eligible_50();
  const auto cfg = mock_config();
  const MockGenerator mock;
  const StubScorer scorer;

  const auto [samples, report] = run_iteration(scorer, train, 1, cfg, mock);
  CHECK(report.iteration == 1);
  CHECK(report.skipped == 0);
  CHECK(report.augmented_size == 50);
  REQUIRE(samples.size() == 50);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    CHECK(samples[i].source_id == train[i].id);
    CHECK(samples[i].iteration == 1);
  }
  CHECK(report.mean_prob_pos.has_value());
  CHECK(report.mean_prob_neg.has_value());

  std::size_t flips = 0;
  for (const auto& s : samples) flips += s.label_flipped;
  CHECK(report.flip_count == flips);

  // Positives stay 1; flips only occur on negatives under the default policy.
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (train[i].label == 1) {
      CHECK(samples[i].label == 1);
      CHECK_FALSE(samples[i].label_flipped);
    } else if (samples[i].label_flipped) {
      CHECK(samples[i].label == 1);
    } else {
      CHECK(samples[i].label == 0);
    }
  }
}

TEST_CASE("negatives can be excluded from augmentation") {
  const auto train = fixtures::all_eligible_50();
  auto cfg = mock_config();
  cfg.augment_negatives = false;
  const auto [samples, report] =
      run_iteration(StubScorer{}, train, 1, cfg, MockGenerator{});
  CHECK(samples.size() == 35);
  CHECK(report.skipped == 15);
  for (const auto& s : samples) CHECK(s.source_id.starts_with("el-p"));
}

TEST_CASE("an empty replacement pool skips the sentence and counts it") {
  const auto train = fixtures::all_eligible_50();
  auto cfg = mock_config();
  cfg.lexicon.entries = {{"像", "", "like"}};  // 像-sentences lose their pool
  const auto [samples, report] =
      run_iteration(StubScorer{}, train, 1, cfg, MockGenerator{});
  // Six positives use 像 (indices 0, 6, 12, 18, 24, 30).
  CHECK(report.skipped == 6);
  CHECK(samples.size() == 44);
  for (const auto& s : samples) {
    CHECK(s.source_id != "el-p0");
    CHECK(s.source_id != "el-p6");
  }
}

TEST_CASE("iteration results are independent of worker count") {
  const auto train = fixtures::all_eligible_50();
  auto cfg = mock_config();
  const auto [serial, r1] = run_iteration(StubScorer{}, train, 1, cfg, MockGenerator{});
  cfg.parallelism = 4;
  const auto [parallel, r2] = run_iteration(StubScorer{}, train, 1, cfg, MockGenerator{});
  CHECK(serial == parallel);
  CHECK(r1.flip_count == r2.flip_count);
}

TEST_CASE("the iteration number feeds the derived seeds") {
  const auto train = fixtures::all_eligible_50();
  const auto cfg = mock_config();
  const auto [one, r1] = run_iteration(StubScorer{}, train, 1, cfg, MockGenerator{});
  const auto [two, r2] = run_iteration(StubScorer{}, train, 2, cfg, MockGenerator{});
  bool any_difference = false;
  for (std::size_t i = 0; i < one.size() && !any_difference; ++i) {
    any_difference = one[i].text != two[i].text;
  }
  CHECK(any_difference);
}

TEST_CASE("merging applies the accumulation policy") {
  const auto train = fixtures::all_eligible_50();
  std::vector<AugmentedSample> gen1, gen2;
  for (int i = 0; i < 3; ++i) {
    AugmentedSample s;
    s.text = "第一轮" + std::to_string(i);
    s.label = 1;
    s.source_id = train[i].id;
    s.iteration = 1;
    gen1.push_back(s);
    s.text = "第二轮" + std::to_string(i);
    s.iteration = 2;
    gen2.push_back(s);
  }

  const auto replace = merge_datasets(train, {gen1, gen2}, Accumulation::Replace);
  CHECK(replace.size() == 53);
  CHECK(replace[50].id == "el-p0#aug2");
  CHECK(replace[50].text == "第二轮0");
  CHECK_FALSE(replace[50].cw_span.has_value());

  const auto accumulate = merge_datasets(train, {gen1, gen2}, Accumulation::Accumulate);
  CHECK(accumulate.size() == 56);
  CHECK(accumulate[50].id == "el-p0#aug1");
  CHECK(accumulate[53].id == "el-p0#aug2");

  auto colliding = train;
  colliding[1].id = "el-p0#aug1";
  CHECK_THROWS_WITH_AS(
      (void)merge_datasets(colliding, {gen1}, Accumulation::Accumulate),
      doctest::Contains("id collision on 'el-p0#aug1'"), std::runtime_error);
}

TEST_CASE("the full loop retrains, reports, and checkpoints") {
  const auto train = fixtures::all_eligible_50();
  auto cfg = mock_config();
  cfg.iterations = 2;
  cfg.accumulation = Accumulation::Accumulate;
  cfg.scorer.train.seed = 999;  // overridden by cfg.seed
  const auto dir = scratch_dir("loop");
  cfg.checkpoint_dir = dir.string();

  const auto result = run_iwas(train, cfg);
  REQUIRE(result.model.has_value());
  CHECK(result.model->seed == 16);
  CHECK(result.manifest.config_hash == config_hash(cfg));

  REQUIRE(result.manifest.reports.size() == 2);
  CHECK(result.manifest.reports[0].train_size == 100);
  CHECK(result.manifest.reports[1].train_size == 150);
  CHECK(result.manifest.reports[0].dev_accuracy.has_value());
  CHECK(result.manifest.samples.size() == 100);

  for (const char* piece : {"iter-0/model", "iter-1/model", "iter-1/manifest.jsonl",
                            "iter-2/model", "iter-2/manifest.jsonl"}) {
    CHECK_MESSAGE(fs::exists(dir / piece), piece);
  }

  // The checkpointed chain is replayable: iteration i's model is a warm
  // start of iteration i-1's on the merged data recorded in the manifest.
  TrainConfig train_cfg = cfg.scorer.train;
  train_cfg.seed = cfg.seed;
  const auto basic = load_model((dir / "iter-0/model").string());
  std::vector<AugmentedSample> first_batch(result.manifest.samples.begin(),
                                           result.manifest.samples.begin() + 50);
  const auto merged1 = merge_datasets(train, {first_batch}, cfg.accumulation);
  const auto replayed = train_classifier(merged1, train_cfg, &basic);

  const auto tmp = dir / "replayed.bin";
  save_model(replayed, tmp.string());
  CHECK(file_bytes(tmp) == file_bytes(dir / "iter-1/model"));
}

TEST_CASE("manifests round-trip through JSONL") {
  const auto train = fixtures::all_eligible_50();
  auto cfg = mock_config();
  cfg.scorer.train.max_epochs = 2;
  const auto result = run_iwas(train, cfg);

  const auto dir = scratch_dir("manifest");
  const auto path = (dir / "manifest.jsonl").string();
  write_manifest(result.manifest, path);
  const auto back = read_manifest(path);

  CHECK(back.config_hash == result.manifest.config_hash);
  REQUIRE(back.samples.size() == result.manifest.samples.size());
  CHECK(back.samples == result.manifest.samples);
  REQUIRE(back.reports.size() == 1);
  CHECK(back.reports[0].train_size == result.manifest.reports[0].train_size);
  CHECK(back.reports[0].dev_accuracy == result.manifest.reports[0].dev_accuracy);
}

TEST_CASE("manifest parsing rejects structural damage") {
  const auto dir = scratch_dir("manifest-bad");
  const auto path = (dir / "m.jsonl").string();

  const auto write = [&](const std::string& content) {
    std::ofstream out(path, std::ios::trunc);
    out << content;
  };

  write(
      "{\"type\":\"sample\",\"text\":\"x\",\"label\":1,\"source_id\":\"s\","
      "\"iteration\":1,\"chosen_index\":0,\"chosen_prob\":0.5,"
      "\"label_flipped\":false}\n");
  CHECK_THROWS_WITH_AS((void)read_manifest(path), doctest::Contains("missing header"),
                       std::runtime_error);

  write("{\"type\":\"header\",\"config_hash\":\"x\",\"reports\":[]}\n{\"type\":\"sample\"}\n");
  CHECK_THROWS_WITH_AS((void)read_manifest(path),
                       doctest::Contains("line 2: bad sample record"),
                       std::runtime_error);

  write("{\"type\":\"header\",\"config_hash\":\"x\",\"reports\":[]}\nnot json\n");
  CHECK_THROWS_WITH_AS((void)read_manifest(path),
                       doctest::Contains("line 2: malformed JSON"), std::runtime_error);

  write(
      "{\"type\":\"header\",\"config_hash\":\"x\",\"reports\":[]}\n"
      "{\"type\":\"header\",\"config_hash\":\"y\",\"reports\":[]}\n");
  CHECK_THROWS_WITH_AS((void)read_manifest(path), doctest::Contains("duplicate header"),
                       std::runtime_error);

  write("{\"type\":\"mystery\"}\n");
  CHECK_THROWS_WITH_AS((void)read_manifest(path),
                       doctest::Contains("unknown record type 'mystery'"),
                       std::runtime_error);
}

TEST_CASE("a failing backend checkpoints the completed prefix and rethrows") {
  const auto train = fixtures::all_eligible_50();
  auto cfg = mock_config();
  const auto dir = scratch_dir("abort");
  cfg.checkpoint_dir = dir.string();

  const FailingBackend backend(7);
  CHECK_THROWS_WITH_AS(
      (void)run_iteration(StubScorer{}, train, 1, cfg, backend),
      doctest::Contains("backend 'failing' failed for source 'el-p7'"),
      std::runtime_error);

  const auto partial = read_manifest((dir / "iter-1/manifest.partial.jsonl").string());
  CHECK(partial.config_hash == config_hash(cfg));
  REQUIRE(partial.samples.size() == 7);
  for (std::size_t i = 0; i < partial.samples.size(); ++i) {
    CHECK(partial.samples[i].source_id == train[i].id);
  }
}

TEST_CASE("iterations must be positive and datasets valid") {
  auto cfg = mock_config();
  cfg.iterations = 0;
  CHECK_THROWS_AS((void)run_iwas(fixtures::all_eligible_50(), cfg), std::invalid_argument);

  cfg = mock_config();
  auto dup = fixtures::all_eligible_50();
  dup.push_back(dup.front());
  CHECK_THROWS_WITH_AS((void)run_iwas(dup, cfg), doctest::Contains("duplicate id"),
                       std::runtime_error);

  cfg.scorer.kind = "external";
  CHECK_THROWS_WITH_AS((void)run_iwas(fixtures::all_eligible_50(), cfg),
                       doctest::Contains("unknown scorer kind"), std::runtime_error);
}
