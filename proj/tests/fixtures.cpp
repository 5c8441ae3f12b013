#include "fixtures.hpp"

#include <stdexcept>

#include "iwas/utf8.hpp"

namespace iwas::fixtures {

namespace {

// Scalar-value offsets of `part` within `text`; throws if absent so a typo
// in a fixture template fails loudly.
Span find_span(const std::string& text, const std::string& part) {
  const auto byte_pos = text.find(part);
  if (byte_pos == std::string::npos) {
    throw std::logic_error("fixture bug: '" + part + "' not in '" + text + "'");
  }
  const auto begin =
      static_cast<std::uint32_t>(utf8::length(std::string_view(text).substr(0, byte_pos)));
  return Span{begin, begin + static_cast<std::uint32_t>(utf8::length(part))};
}

LabeledSentence simile(std::string id, const std::string& topic, const std::string& cw,
                       const std::string& vehicle, const std::string& text) {
  LabeledSentence s;
  s.id = std::move(id);
  s.text = text;
  s.label = 1;
  s.topic_span = find_span(text, topic);
  s.cw_span = find_span(text, cw);
  s.vehicle_span = find_span(text, vehicle);
  return s;
}

LabeledSentence plain(std::string id, std::string text, int label) {
  LabeledSentence s;
  s.id = std::move(id);
  s.text = std::move(text);
  s.label = label;
  return s;
}

const std::vector<std::string> kTopics = {"月光", "歌声", "湖水", "笑声", "晚霞",
                                          "春风", "夜色", "琴声", "眼神", "天气"};
// Known to the completion mock AND seen as simile vehicles in training.
const std::vector<std::string> kVehiclesA = {"火炉", "白云", "珍珠", "细雨"};
// Known to the completion mock but seen only in literal (negative) frames.
const std::vector<std::string> kVehiclesB = {"镜子", "棉花", "灯笼", "绸缎"};
// Never seen in training and unknown to the mock.
const std::vector<std::string> kPlainNouns = {"台灯", "木椅", "水壶", "瓦罐", "柜子"};

}  // namespace

LabeledSentence zh_example() {
  return simile("zh-1", "天气", "就像", "火炉", "八月的天气就像是火炉一样烘烤着大地。");
}

LabeledSentence en_example() {
  return simile("en-1", "weather", "same as", "furnace",
                "The weather in August is same as a furnace baking the hot earth");
}

std::vector<LabeledSentence> all_eligible_50() {
  const std::vector<std::string> cws = {"像", "宛如", "好似", "仿佛", "如同", "好比"};
  std::vector<LabeledSentence> ds;
  // 35 similes cycling topics, vehicles, and comparatives: every
  // replacement pool keeps at least five entries.
  for (std::size_t i = 0; i < 35; ++i) {
    const auto& t = kTopics[i % kTopics.size()];
    const auto& cw = cws[i % cws.size()];
    const auto& v = kVehiclesA[i % kVehiclesA.size()];
    ds.push_back(simile("el-p" + std::to_string(i), t, cw, v, t + cw + v + "。"));
  }
  // 15 literal negatives, half with a comma so both prompt routes run.
  for (std::size_t i = 0; i < 15; ++i) {
    const auto& t = kTopics[i % kTopics.size()];
    const auto& n = kPlainNouns[i % kPlainNouns.size()];
    const std::string text = i % 2 == 0 ? t + "里没有" + n + "。"
                                        : t + "里没有" + n + "，大家都知道。";
    ds.push_back(plain("el-n" + std::to_string(i), text, 0));
  }
  return ds;
}

std::vector<LabeledSentence> mixed_200() {
  const std::vector<std::string> cws = {"像", "宛如", "好似", "仿佛", "如同", "好比"};
  std::vector<LabeledSentence> ds;
  // 110 similes over all prefix comparatives plus ten circumfix cases.
  for (std::size_t i = 0; i < 100; ++i) {
    const auto& t = kTopics[i % kTopics.size()];
    const auto& cw = cws[i % cws.size()];
    const auto& v = i % 2 == 0 ? kVehiclesA[i % kVehiclesA.size()]
                               : kVehiclesB[i % kVehiclesB.size()];
    ds.push_back(simile("mix-p" + std::to_string(i), t, cw, v, t + cw + v + "一般。"));
  }
  for (std::size_t i = 0; i < 10; ++i) {
    const auto& t = kTopics[i % kTopics.size()];
    const auto& v = kVehiclesA[i % kVehiclesA.size()];
    // Circumfix annotation follows the suffix word.
    ds.push_back(simile("mix-c" + std::to_string(i), t, "一样", v,
                        t + "跟" + v + "一样。"));
  }
  // 50 literal negatives without a comparative.
  for (std::size_t i = 0; i < 50; ++i) {
    const auto& t = kTopics[i % kTopics.size()];
    const auto& n = kPlainNouns[i % kPlainNouns.size()];
    const std::string text = i % 3 == 0 ? t + "里没有" + n + "，谁都清楚。"
                                        : t + "和" + n + "都不见了。";
    ds.push_back(plain("mix-n" + std::to_string(i), text, 0));
  }
  // 40 negatives that still carry a comparative word (literal comparisons).
  for (std::size_t i = 0; i < 40; ++i) {
    const auto& t = kTopics[i % kTopics.size()];
    const auto& n = kPlainNouns[i % kPlainNouns.size()];
    LabeledSentence s = plain("mix-q" + std::to_string(i),
                              t + "像" + n + "那样常见。", 0);
    s.cw_span = find_span(s.text, "像");
    ds.push_back(std::move(s));
  }
  return ds;
}

namespace {

std::vector<LabeledSentence> separable(const std::string& id_prefix, std::size_t n_pos,
                                       std::size_t n_neg, std::size_t offset) {
  const std::vector<std::string> preds = {"温柔", "明亮", "动人", "清澈", "灿烂"};
  const std::vector<std::string> verbs = {"打扫", "修理", "整理", "清洗", "擦拭"};
  std::vector<LabeledSentence> ds;
  for (std::size_t i = 0; i < n_pos; ++i) {
    const std::size_t k = offset + i;
    const auto& t = kTopics[k % kTopics.size()];
    const auto& v = kVehiclesA[(k / kTopics.size()) % kVehiclesA.size()];
    const auto& p = preds[(k / 40) % preds.size()];
    ds.push_back(simile(id_prefix + "-p" + std::to_string(i), t, "像", v,
                        t + "像" + v + "一样" + p + "。"));
  }
  for (std::size_t i = 0; i < n_neg; ++i) {
    const std::size_t k = offset + i;
    const auto& t = kTopics[k % kTopics.size()];
    const auto& n = kPlainNouns[(k / kTopics.size()) % kPlainNouns.size()];
    const auto& v = verbs[(k / 50) % verbs.size()];
    ds.push_back(plain(id_prefix + "-n" + std::to_string(i),
                       t + "旁的" + n + "被" + v + "过了。", 0));
  }
  return ds;
}

}  // namespace

std::vector<LabeledSentence> separable_train_200() {
  return separable("sep-train", 100, 100, 0);
}

std::vector<LabeledSentence> separable_test_100() {
  return separable("sep-test", 50, 50, 113);
}

std::vector<LabeledSentence> biased_train() {
  std::vector<LabeledSentence> ds;
  // 40 similes, all with 像 and the mock-covered vehicles.
  std::size_t i = 0;
  for (const auto& t : kTopics) {
    for (const auto& v : kVehiclesA) {
      ds.push_back(simile("bt-p" + std::to_string(i++), t, "像", v, t + "像" + v + "。"));
    }
  }
  // 40 literal negatives putting the B vehicles in non-simile contexts.
  i = 0;
  for (const auto& t : kTopics) {
    for (const auto& v : kVehiclesB) {
      const std::string text =
          i % 2 == 0 ? t + "里没有" + v + "。" : t + "和" + v + "都不见了。";
      ds.push_back(plain("bt-n" + std::to_string(i++), text, 0));
    }
  }
  return ds;
}

std::vector<LabeledSentence> diverse_test() {
  std::vector<LabeledSentence> ds;
  std::size_t id = 0;
  const auto add_pos = [&](const std::string& t, const std::string& cw,
                           const std::string& v, const std::string& text) {
    ds.push_back(simile("dt-p" + std::to_string(id++), t, cw, v, text));
  };

  // 20 with the biased comparative: easy cases for any detector.
  for (std::size_t i = 0; i < 20; ++i) {
    const auto& t = kTopics[i % kTopics.size()];
    const auto& v = kVehiclesA[i % kVehiclesA.size()];
    add_pos(t, "像", v, t + "像" + v + "，真美。");
  }
  // 44 with unseen prefix comparatives over vehicles the biased detector
  // associates with negatives.
  const std::vector<std::pair<std::string, std::size_t>> spread = {
      {"宛如", 12}, {"好似", 10}, {"仿佛", 8}, {"如同", 8}, {"好比", 6}};
  std::size_t k = 0;
  for (const auto& [cw, count] : spread) {
    for (std::size_t i = 0; i < count; ++i, ++k) {
      const auto& t = kTopics[k % kTopics.size()];
      const auto& v = kVehiclesB[k % kVehiclesB.size()];
      add_pos(t, cw, v, t + cw + v + "一般。");
    }
  }
  // 6 circumfix cases; the comparative annotation covers the suffix.
  for (std::size_t i = 0; i < 6; ++i) {
    const auto& t = kTopics[i % kTopics.size()];
    const auto& v = kVehiclesB[i % kVehiclesB.size()];
    add_pos(t, "一样", v, t + "跟" + v + "一样。");
  }

  // 30 literal negatives: familiar frames, half with nouns no model saw.
  for (std::size_t i = 0; i < 30; ++i) {
    const auto& t = kTopics[i % kTopics.size()];
    const std::string text =
        i % 2 == 0 ? t + "里没有" + kPlainNouns[i % kPlainNouns.size()] + "。"
                   : t + "和" + kVehiclesB[i % kVehiclesB.size()] + "都搬走了。";
    ds.push_back(plain("dt-n" + std::to_string(i), text, 0));
  }
  return ds;
}

std::vector<std::vector<LabeledSentence>> all_fixture_sets() {
  return {
      {zh_example(), en_example()},
      all_eligible_50(),
      mixed_200(),
      separable_train_200(),
      separable_test_100(),
      biased_train(),
      diverse_test(),
  };
}

}  // namespace iwas::fixtures
