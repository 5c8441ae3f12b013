#include <doctest.h>

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "iwas/metrics.hpp"

using namespace iwas;

namespace {

// Scores texts from a fixed table; unknown text is a test bug.
class TableScorer : public Scorer {
 public:
  explicit TableScorer(std::map<std::string, double> probs) : probs_(std::move(probs)) {}
  double score(const std::string& text) const override { return probs_.at(text); }

 private:
  std::map<std::string, double> probs_;
};

class ConstantScorer : public Scorer {
 public:
  explicit ConstantScorer(double p) : p_(p) {}
  double score(const std::string&) const override { return p_; }

 private:
  double p_;
};

LabeledSentence rec(const std::string& text, int label) {
  LabeledSentence s;
  s.id = text;
  s.text = text;
  s.label = label;
  return s;
}

}  // namespace

TEST_CASE("the worked confusion example") {
  const auto m = metrics({3, 1, 2, 4});
  CHECK(m.accuracy == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(m.precision == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(m.recall == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(std::abs(m.f1 - 2.0 / 3.0) <= 1e-9);
}

TEST_CASE("perfect predictions score 1 everywhere") {
  const auto m = metrics({5, 0, 0, 5});
  CHECK(m.accuracy == 1.0);
  CHECK(m.precision == 1.0);
  CHECK(m.recall == 1.0);
  CHECK(m.f1 == 1.0);
}

TEST_CASE("zero denominators fall back to 0 by convention") {
  const auto no_positive_predictions = metrics({0, 0, 3, 7});
  CHECK(no_positive_predictions.precision == 0.0);
  CHECK(no_positive_predictions.recall == 0.0);
  CHECK(no_positive_predictions.f1 == 0.0);
  CHECK(no_positive_predictions.accuracy == doctest::Approx(0.7));

  const auto all_negative = metrics({0, 0, 0, 5});
  CHECK(all_negative.accuracy == 1.0);
  CHECK(all_negative.precision == 0.0);
  CHECK(all_negative.recall == 0.0);
  CHECK(all_negative.f1 == 0.0);

  CHECK_THROWS_WITH_AS((void)metrics({0, 0, 0, 0}), "empty confusion counts",
                       std::invalid_argument);
}

TEST_CASE("metrics agree with the direct formulas on every small table") {
  for (std::uint64_t tp = 0; tp <= 12; ++tp) {
    for (std::uint64_t fp = 0; tp + fp <= 12; ++fp) {
      for (std::uint64_t fn = 0; tp + fp + fn <= 12; ++fn) {
        for (std::uint64_t tn = 0; tp + fp + fn + tn <= 12; ++tn) {
          const ConfusionCounts c{tp, fp, fn, tn};
          if (c.total() == 0) continue;
          const auto m = metrics(c);
          const double total = static_cast<double>(c.total());
          CHECK(m.accuracy ==
                doctest::Approx(static_cast<double>(tp + tn) / total).epsilon(1e-12));
          const double prec =
              tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
          const double rec =
              tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
          CHECK(m.precision == doctest::Approx(prec).epsilon(1e-12));
          CHECK(m.recall == doctest::Approx(rec).epsilon(1e-12));
          // Independent route: F1 = 2tp / (2tp + fp + fn).
          const double f1 = 2 * tp + fp + fn == 0
                                ? 0.0
                                : 2.0 * static_cast<double>(tp) /
                                      static_cast<double>(2 * tp + fp + fn);
          CHECK(m.f1 == doctest::Approx(f1).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("confusion tallies predictions against gold labels") {
  const std::vector<LabeledSentence> ds = {
      rec("a", 1), rec("b", 1), rec("c", 0), rec("d", 0), rec("e", 1), rec("f", 0),
  };
  const TableScorer scorer({{"a", 0.9},   // tp
                            {"b", 0.2},   // fn
                            {"c", 0.8},   // fp
                            {"d", 0.1},   // tn
                            {"e", 0.51},  // tp
                            {"f", 0.49}});  // tn
  const auto c = confusion(scorer, ds);
  CHECK(c == ConfusionCounts{2, 1, 1, 2});
}

TEST_CASE("a score equal to the threshold predicts positive") {
  const std::vector<LabeledSentence> ds = {rec("x", 1), rec("y", 0)};
  const auto c = confusion(ConstantScorer(0.5), ds);
  CHECK(c == ConfusionCounts{1, 1, 0, 0});

  const auto strict = confusion(ConstantScorer(0.5), ds, 0.500001);
  CHECK(strict == ConfusionCounts{0, 0, 1, 1});
}

TEST_CASE("the threshold parameter moves the decision boundary") {
  const std::vector<LabeledSentence> ds = {rec("x", 1), rec("y", 0)};
  const auto c = confusion(ConstantScorer(0.6), ds, 0.7);
  CHECK(c == ConfusionCounts{0, 0, 1, 1});
}

TEST_CASE("evaluating nothing is an error") {
  CHECK_THROWS_WITH_AS((void)confusion(ConstantScorer(0.5), {}),
                       "cannot evaluate on an empty dataset", std::invalid_argument);
}
