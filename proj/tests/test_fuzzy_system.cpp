#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "autometric/architecture.hpp"
#include "autometric/error.hpp"
#include "autometric/fuzzy_system.hpp"
#include "oracle.hpp"

using namespace autometric;

namespace {

const FuzzySystem& stage_system(const EthicsArchitecture& arch, std::string_view name) {
  for (const auto& s : arch.stages())
    if (s.name() == name) return s.system;
  throw std::logic_error("no stage");
}

FuzzySystem symmetric_system() {
  FuzzySystem s;
  s.name = "sym";
  s.inputs.push_back({"x", 0, 1, {{"on", MembershipFunction::trapezoid(0, 0, 1, 1)}}});
  s.output = {"y", 1, 10, {{"mid", MembershipFunction::gaussian(1, 5.5)}}};
  s.rules.push_back({"R1", {{"x", "on"}}, {"y", "mid"}});
  return s;
}

}  // namespace

TEST(Fuzzify, SpeedVariable) {
  const auto arch = build_takeover_architecture();
  const auto& rw = stage_system(arch, "rightwrong");
  const auto& speed = *rw.find_input("speed");
  auto d = fuzzify(speed, 20);
  EXPECT_DOUBLE_EQ(d.at("lowrisk"), 1.0);
  EXPECT_DOUBLE_EQ(d.at("highrisk"), 0.0);
  d = fuzzify(speed, 60);
  EXPECT_DOUBLE_EQ(d.at("lowrisk"), 0.5);
  EXPECT_DOUBLE_EQ(d.at("highrisk"), 0.5);
  d = fuzzify(speed, 120);
  EXPECT_DOUBLE_EQ(d.at("lowrisk"), 0.0);
  EXPECT_DOUBLE_EQ(d.at("highrisk"), 1.0);
}

TEST(FireRule, MinimumOfDegrees) {
  const Rule r{"R", {{"a", "t"}, {"b", "t"}, {"c", "t"}}, {"y", "o"}};
  EXPECT_DOUBLE_EQ(fire_rule(r, {{"a", {{"t", 0.5}}}, {"b", {{"t", 1.0}}}, {"c", {{"t", 0.2}}}}), 0.2);
  EXPECT_DOUBLE_EQ(fire_rule(r, {{"a", {{"t", 1.0}}}, {"b", {{"t", 1.0}}}, {"c", {{"t", 1.0}}}}), 1.0);
  EXPECT_DOUBLE_EQ(fire_rule(r, {{"a", {{"t", 0.0}}}, {"b", {{"t", 0.9}}}, {"c", {{"t", 0.9}}}}), 0.0);
}

TEST(FireRule, UnresolvableAntecedentNamesIt) {
  const Rule r{"R", {{"a", "t"}, {"b", "midrisk"}}, {"y", "o"}};
  try {
    fire_rule(r, {{"a", {{"t", 0.5}}}, {"b", {{"t", 1.0}}}});
    FAIL();
  } catch (const LookupError& e) {
    EXPECT_NE(std::string(e.what()).find("midrisk"), std::string::npos);
  }
  EXPECT_THROW(fire_rule(r, {{"a", {{"t", 0.5}}}}), LookupError);
}

TEST(Defuzz, SymmetricConsequentCentersAtAxis) {
  const auto s = symmetric_system();
  const std::vector<double> one{1.0};
  EXPECT_NEAR(*aggregate_and_defuzz(s, one), 5.5, 1e-12);
}

TEST(Defuzz, NothingFires) {
  const auto arch = build_takeover_architecture();
  const auto& rw = stage_system(arch, "rightwrong");
  const std::vector<double> zero{0.0, 0.0};
  EXPECT_FALSE(aggregate_and_defuzz(rw, zero).has_value());
  const InferenceEngine engine(rw);
  EXPECT_FALSE(engine.defuzzify(zero).has_value());
}

TEST(Defuzz, TcwrongOnlyMatchesOracle) {
  const auto arch = build_takeover_architecture();
  const auto& rw = stage_system(arch, "rightwrong");
  const std::vector<double> s{1.0, 0.0};
  const double got = *aggregate_and_defuzz(rw, s);
  const double want = *oracle::centroid(rw, s);
  EXPECT_NEAR(got, want, 1e-4);
  EXPECT_LT(got, 5.0);
  // Frozen from the 10^6-point oracle.
  EXPECT_NEAR(got, 4.77500, 1e-4);
}

TEST(Infer, RightWrongExamples) {
  const auto arch = build_takeover_architecture();
  const auto& rw = stage_system(arch, "rightwrong");
  const InferenceEngine engine(rw);

  const ValueMap low{{"distance", 1}, {"lane", 1}, {"speed", 10}};
  const auto a = engine.infer(low);
  EXPECT_FALSE(a.no_firing);
  EXPECT_LT(a.value, 5.0);
  EXPECT_NEAR(a.value, oracle::infer(rw, low), 1e-4);
  EXPECT_EQ(infer(rw, low).value, a.value);

  const ValueMap high{{"distance", 10}, {"lane", 10}, {"speed", 100}};
  const auto b = engine.infer(high);
  EXPECT_GT(b.value, 5.5);
  EXPECT_NEAR(b.value, oracle::infer(rw, high), 1e-4);

  const ValueMap mid{{"distance", 5.5}, {"lane", 7.5}, {"speed", 60}};
  const auto c = engine.infer(mid);
  EXPECT_GT(c.value, 1.0);
  EXPECT_LT(c.value, 10.0);
}

TEST(Infer, NoFiringFallsBackToMidpoint) {
  const auto arch = build_takeover_architecture();
  const InferenceEngine engine(stage_system(arch, "rightwrong"));
  // distance low, lane high: neither conjunctive rule fires.
  const auto r = engine.infer(ValueMap{{"distance", 1}, {"lane", 10}, {"speed", 10}});
  EXPECT_TRUE(r.no_firing);
  EXPECT_DOUBLE_EQ(r.value, 5.5);
}

TEST(Infer, MissingInputNamesVariable) {
  const auto arch = build_takeover_architecture();
  const InferenceEngine engine(stage_system(arch, "rightwrong"));
  try {
    engine.infer(ValueMap{{"distance", 1}, {"lane", 1}});
    FAIL();
  } catch (const LookupError& e) {
    EXPECT_NE(std::string(e.what()).find("speed"), std::string::npos);
  }
  EXPECT_THROW(infer(stage_system(arch, "rightwrong"), ValueMap{{"distance", 1}}), LookupError);
}

TEST(Infer, GridIncludesEndpoints) {
  const InferenceEngine engine(symmetric_system());
  ASSERT_EQ(engine.grid().size(), kDefaultGridPoints);
  EXPECT_EQ(engine.grid().front(), 1.0);
  EXPECT_EQ(engine.grid().back(), 10.0);
}

TEST(Validate, CanonicalSystemsClean) {
  for (const auto& arch : {build_takeover_architecture(), build_dilemma_architecture()})
    for (const auto& s : arch.stages()) EXPECT_TRUE(validate_system(s.system).empty()) << s.name();
}

TEST(Validate, BadTrapezoidAndDanglingLabel) {
  auto s = symmetric_system();
  s.inputs[0].terms.push_back({"bad", MembershipFunction::unchecked(MfShape::trapezoid, std::vector<double>{5, 4, 3, 2})});
  EXPECT_EQ(validate_system(s).size(), 1u);

  auto t = symmetric_system();
  t.rules.push_back({"R2", {{"x", "midrisk"}}, {"y", "mid"}});
  const auto v = validate_system(t);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].find("midrisk"), std::string::npos);
}

TEST(Validate, StructuralProblems) {
  auto s = symmetric_system();
  s.grid_points = 50;
  s.inputs[0].lo = 2;
  s.inputs[0].hi = 1;
  s.rules[0].antecedents.clear();
  s.inputs.push_back(s.inputs[0]);
  EXPECT_GE(validate_system(s).size(), 4u);
  EXPECT_THROW(InferenceEngine{s}, ValidationError);
}

TEST(InferProperty, RangeContainmentAndOracle) {
  const auto arch = build_takeover_architecture();
  std::mt19937_64 rng(21);
  for (const auto& stage : arch.stages()) {
    const InferenceEngine engine(stage.system);
    for (int trial = 0; trial < 300; ++trial) {
      std::vector<double> in;
      for (const auto& v : stage.system.inputs) in.push_back(std::uniform_real_distribution<double>(v.lo, v.hi)(rng));
      const auto r = engine.infer(in);
      ASSERT_GE(r.value, stage.system.output.lo);
      ASSERT_LE(r.value, stage.system.output.hi);
      const auto s = engine.strengths(in);
      ValueMap named;
      for (std::size_t i = 0; i < in.size(); ++i) named[stage.system.inputs[i].name] = in[i];
      const auto os = oracle::strengths(stage.system, named);
      for (std::size_t i = 0; i < s.size(); ++i) ASSERT_NEAR(s[i], os[i], 1e-12);
    }
  }
}

TEST(InferProperty, PureAndGridStable) {
  const auto arch = build_dilemma_architecture();
  std::mt19937_64 rng(22);
  for (const auto& stage : arch.stages()) {
    auto fine = stage.system;
    fine.grid_points = 2 * stage.system.grid_points - 1;
    const InferenceEngine a(stage.system);
    const InferenceEngine b(fine);
    const double width = stage.system.output.hi - stage.system.output.lo;
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<double> in;
      for (const auto& v : stage.system.inputs) in.push_back(std::uniform_real_distribution<double>(v.lo, v.hi)(rng));
      const double x = a.infer(in).value;
      ASSERT_EQ(x, a.infer(in).value);
      ASSERT_LT(std::abs(x - b.infer(in).value), 10.0 * width / static_cast<double>(stage.system.grid_points));
    }
  }
}
