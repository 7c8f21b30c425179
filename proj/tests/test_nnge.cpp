#include <random>

#include <gtest/gtest.h>
#include <json.hpp>

#include "autometric/error.hpp"
#include "autometric/nnge.hpp"

using namespace autometric;

namespace {

Hyperrectangle box(std::vector<Interval> iv, std::string label, std::size_t covered = 1) {
  return {std::move(iv), std::move(label), covered};
}

}  // namespace

TEST(Distance, Examples) {
  const std::vector<Interval> r1{{0, 10}};
  EXPECT_DOUBLE_EQ(exemplar_distance(std::vector<double>{2}, box({{1, 3}}, "A"), r1), 0.0);
  EXPECT_DOUBLE_EQ(exemplar_distance(std::vector<double>{5}, box({{1, 3}}, "A"), r1), 0.2);
  EXPECT_DOUBLE_EQ(exemplar_distance(std::vector<double>{0}, box({{1, 3}}, "A"), r1), 0.1);
  const std::vector<Interval> r2{{0, 10}, {0, 10}};
  EXPECT_NEAR(exemplar_distance(std::vector<double>{0, 10}, box({{3, 4}, {0, 6}}, "A"), r2), 0.5, 1e-15);
  EXPECT_THROW(exemplar_distance(std::vector<double>{1}, box({{1, 1}}, "A"), std::vector<Interval>{{2, 2}}), ConfigError);
}

TEST(DistanceProperty, ZeroIffInsideAndMonotoneWidening) {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(0, 10);
  const std::vector<Interval> ranges{{0, 10}, {0, 10}, {0, 10}};
  for (int trial = 0; trial < 1000; ++trial) {
    Hyperrectangle h;
    h.label = "A";
    for (int d = 0; d < 3; ++d) {
      double a = u(rng), b = u(rng);
      if (a > b) std::swap(a, b);
      h.intervals.push_back({a, b});
    }
    const std::vector<double> x{u(rng), u(rng), u(rng)};
    const double d0 = exemplar_distance(x, h, ranges);
    ASSERT_EQ(d0 == 0.0, h.contains(x));
    auto wider = h;
    const auto axis = rng() % 3;
    wider.intervals[axis].lo = std::min(wider.intervals[axis].lo, std::max(0.0, x[axis]));
    wider.intervals[axis].hi = std::max(wider.intervals[axis].hi, std::min(10.0, x[axis]));
    ASSERT_LE(exemplar_distance(x, wider, ranges), d0);
  }
}

TEST(Classify, NearestWithTieToEarliest) {
  const NngeModel m({"x"}, {{0, 10}}, {box({{1, 2}}, "A"), box({{8, 8}}, "B"), box({{5, 5}}, "C")});
  EXPECT_EQ(m.classify(std::vector<double>{1.5}), "A");
  EXPECT_EQ(m.classify(std::vector<double>{9}), "B");
  // 3.5 is 0.15 from A and 0.15 from C
  EXPECT_EQ(m.classify(std::vector<double>{3.5}), "A");
  EXPECT_EQ(m.classes(), (std::vector<std::string>{"A", "B", "C"}));

  const NngeModel single({"x"}, {{0, 10}}, {box({{4, 4}}, "only")});
  EXPECT_EQ(single.classify(std::vector<double>{100}), "only");
  const NngeModel empty({"x"}, {{0, 10}}, {});
  EXPECT_THROW(empty.classify(std::vector<double>{1}), Error);
}

TEST(Train, ToyOneDimensional) {
  const std::vector<Example> ex{{{1}, "A"}, {{2}, "A"}, {{8}, "B"}};
  const auto m = train(ex, {"x"});
  ASSERT_EQ(m.exemplars().size(), 2u);
  EXPECT_EQ(m.exemplars()[0].label, "A");
  EXPECT_EQ(m.exemplars()[0].intervals[0], (Interval{1, 2}));
  EXPECT_EQ(m.exemplars()[0].covered, 2u);
  EXPECT_EQ(m.exemplars()[1].label, "B");
  EXPECT_EQ(m.exemplars()[1].intervals[0], (Interval{8, 8}));
  EXPECT_DOUBLE_EQ(accuracy(m, ex), 1.0);
}

TEST(Train, SingleExample) {
  const std::vector<Example> ex{{{3, 4}, "A"}};
  const auto m = train(ex, {"x", "y"});
  ASSERT_EQ(m.exemplars().size(), 1u);
  EXPECT_EQ(m.exemplars()[0].intervals[1], (Interval{4, 4}));
}

TEST(Train, RejectsGeneralizationOverOtherClass) {
  const std::vector<Example> ex{{{1}, "A"}, {{5}, "B"}, {{9}, "A"}};
  const auto m = train(ex, {"x"});
  for (const auto& h : m.exemplars())
    for (const auto& e : ex)
      if (h.label != e.label) EXPECT_FALSE(h.contains(e.features));
  EXPECT_DOUBLE_EQ(accuracy(m, ex), 1.0);
}

TEST(Train, SplitsBoxContainingNewExample) {
  // A grows to [0,10] x [0,10]; the B example lands inside and must be carved out.
  const std::vector<Example> ex{{{0, 0}, "A"}, {{10, 10}, "A"}, {{5, 5}, "B"}, {{0, 10}, "A"}};
  const auto m = train(ex, {"x", "y"});
  for (const auto& h : m.exemplars())
    if (h.label == "A") EXPECT_FALSE(h.contains(std::vector<double>{5, 5}));
  EXPECT_DOUBLE_EQ(accuracy(m, ex), 1.0);
}

TEST(Train, Errors) {
  EXPECT_THROW(train(std::vector<Example>{}, {"x"}), TrainingError);
  EXPECT_THROW(train(std::vector<Example>{{{1}, "A"}, {{1, 2}, "A"}}, {"x"}), TrainingError);
  try {
    train(std::vector<Example>{{{1}, "A"}, {{2}, "B"}, {{1}, "B"}}, {"x"});
    FAIL();
  } catch (const TrainingError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find('1'), std::string::npos);
    EXPECT_NE(msg.find('3'), std::string::npos);
  }
  EXPECT_THROW(train(std::vector<Example>{{{1}, "A"}}, {"x", "y"}), TrainingError);
}

TEST(TrainProperty, NoWrongClassContainmentAndFullResubstitution) {
  std::mt19937_64 rng(62);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t dims = 1 + rng() % 4;
    // a 1-D grid only has 21 distinct points
    const std::size_t n = 2 + rng() % (dims == 1 ? 19 : 60);
    std::vector<Example> ex;
    std::uniform_int_distribution<int> grid(0, 20);
    while (ex.size() < n) {
      Example e;
      for (std::size_t d = 0; d < dims; ++d) e.features.push_back(grid(rng) * 0.5);
      e.label = std::string(1, static_cast<char>('A' + rng() % 3));
      const bool clash = std::any_of(ex.begin(), ex.end(), [&](const Example& o) { return o.features == e.features; });
      if (!clash) ex.push_back(std::move(e));
    }
    std::vector<std::string> names;
    for (std::size_t d = 0; d < dims; ++d) names.push_back("f" + std::to_string(d));
    bool degenerate = false;
    for (std::size_t d = 0; d < dims; ++d)
      degenerate |= std::all_of(ex.begin(), ex.end(), [&](const Example& e) { return e.features[d] == ex[0].features[d]; });
    if (degenerate) continue;
    const auto m = train(ex, names);
    for (const auto& h : m.exemplars())
      for (const auto& e : ex)
        if (h.label != e.label) ASSERT_FALSE(h.contains(e.features));
    ASSERT_DOUBLE_EQ(accuracy(m, ex), 1.0);
  }
}

TEST(Rules, RenderingAndFiltering) {
  const NngeModel m({"distance", "lane"}, {{1, 10}, {1, 10}},
                    {box({{5, 10}, {8.04, 10}}, "2", 7), box({{3, 3}, {4, 4}}, "0", 1), box({{1, 4}, {1, 5}}, "0", 9)});
  const auto rules = extract_rules(m);
  ASSERT_EQ(rules.size(), 2u);
  EXPECT_EQ(rules[0].covered, 9u);
  EXPECT_EQ(render_rule(rules[1]), "IF (5 <= distance <= 10) AND (8.04 <= lane <= 10) THEN class 2  [covered 7]");
  const auto all = extract_rules(m, 1);
  ASSERT_EQ(all.size(), 3u);
  EXPECT_EQ(render_rule(all[2]), "IF (distance = 3) AND (lane = 4) THEN class 0  [covered 1]");
  EXPECT_TRUE(extract_rules(m, 100).empty());
  EXPECT_EQ(render_rule(all[2], {{"lane", 10}}), "IF (distance = 3) AND (lane_x10 = 40) THEN class 0  [covered 1]");

  const auto j = nlohmann::json::parse(render_rules_json(rules));
  ASSERT_EQ(j.size(), 2u);
  EXPECT_EQ(j[1]["class"], "2");
  EXPECT_EQ(j[1]["covered"], 7);
  EXPECT_DOUBLE_EQ(j[1]["intervals"]["lane"][0].get<double>(), 8.04);
  const auto text = render_rules_text(rules);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
}

TEST(KFold, LeaveOneOutAndToy) {
  std::vector<Example> ex;
  for (int i = 0; i < 5; ++i) ex.push_back({{static_cast<double>(i)}, "lo"});
  for (int i = 0; i < 5; ++i) ex.push_back({{10.0 + i}, "hi"});
  const auto loo = kfold_eval(ex, {"x"}, ex.size(), 7);
  EXPECT_EQ(loo.fold_accuracy.size(), 10u);
  EXPECT_DOUBLE_EQ(loo.mean_accuracy, 1.0);
  const auto five = kfold_eval(ex, {"x"}, 5, 7);
  EXPECT_DOUBLE_EQ(five.mean_accuracy, 1.0);
  const auto again = kfold_eval(ex, {"x"}, 5, 7);
  EXPECT_EQ(five.fold_accuracy, again.fold_accuracy);
  EXPECT_THROW(kfold_eval(ex, {"x"}, 1, 7), Error);
  EXPECT_THROW(kfold_eval(ex, {"x"}, 11, 7), Error);
}

TEST(KFold, SeedChangesFoldsButStaysDeterministic) {
  std::mt19937_64 rng(63);
  std::vector<Example> ex;
  for (int i = 0; i < 40; ++i) {
    const double x = std::uniform_real_distribution<double>(0, 10)(rng);
    ex.push_back({{x}, (x < 3 || x > 7) ? "a" : "b"});
  }
  EXPECT_EQ(kfold_eval(ex, {"x"}, 4, 1).fold_accuracy, kfold_eval(ex, {"x"}, 4, 1).fold_accuracy);
}
