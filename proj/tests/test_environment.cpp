#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "chanrate/environment.hpp"
#include "chanrate/graph.hpp"
#include "chanrate/io.hpp"
#include "reference_table.hpp"

using namespace chanrate;

namespace {

TraceTable two_segments(std::uint64_t flip, std::uint64_t horizon) {
  TraceTable t;
  t.segments.push_back({0, Grid(2, 1, {0.9, 0.3})});
  t.segments.push_back({flip, Grid(2, 1, {0.3, 0.9})});
  t.horizon = horizon;
  return t;
}

}  // namespace

TEST(Stationary, DegenerateProbabilities) {
  const auto env = stationary_env(LinkModel(RateSet({1}), Grid(2, 1, {1.0, 0.0})), 5);
  for (std::uint64_t n = 0; n < 1000; ++n) {
    EXPECT_TRUE(env.draw({0, 0}, n));
    EXPECT_FALSE(env.draw({1, 0}, n));
  }
}

TEST(Stationary, EmpiricalMeanAndLagCorrelation) {
  const auto env = stationary_env(LinkModel(RateSet({1}), Grid(1, 1, 0.5)), 2024);
  const std::uint64_t N = 100000;
  std::vector<double> x(N);
  double sum = 0;
  for (std::uint64_t n = 0; n < N; ++n) sum += x[n] = env.draw({0, 0}, n);
  const double mean = sum / N;
  EXPECT_NEAR(mean, 0.5, 0.01);
  double num = 0, den = 0;
  for (std::uint64_t n = 0; n < N; ++n) {
    den += (x[n] - mean) * (x[n] - mean);
    if (n + 1 < N) num += (x[n] - mean) * (x[n + 1] - mean);
  }
  EXPECT_LT(std::abs(num / den), 4.0 / std::sqrt(static_cast<double>(N)));
}

TEST(Stationary, OutcomesDependOnlyOnSeedPairAndStep) {
  const auto a = stationary_env(fixtures::table_model(), 7);
  const auto b = stationary_env(fixtures::table_model(), 7);
  const auto c = a.reseeded(8);
  int differ = 0;
  for (std::uint64_t n = 0; n < 2000; ++n) {
    EXPECT_EQ(a.draw({1, 6}, n), b.draw({1, 6}, n));
    differ += a.draw({1, 6}, n) != c.draw({1, 6}, n);
  }
  EXPECT_GT(differ, 100);
}

TEST(Stationary, OccupancyIsApplied) {
  const auto env = stationary_env(LinkModel(RateSet({2}), Grid(1, 1, 0.8), std::vector<double>{0.5}));
  EXPECT_DOUBLE_EQ(env.theta_at(0)(0, 0), 0.4);
  EXPECT_DOUBLE_EQ(env.mu_star_at(123), 0.8);
}

TEST(Trace, SingleSegmentEqualsStationary) {
  TraceTable t;
  t.segments.push_back({0, fixtures::table_theta()});
  t.horizon = 5000;
  const auto tr = trace_env(fixtures::table_rates(), t, 3);
  const auto st = stationary_env(fixtures::table_model(), 3);
  for (std::uint64_t n = 0; n < 5000; n += 7)
    for (int c = 0; c < 5; ++c) EXPECT_EQ(tr.draw({c, 5}, n), st.draw({c, 5}, n));
}

TEST(Trace, BestPairSwitchesAtSegmentBoundary) {
  const auto env = trace_env(RateSet({1}), two_segments(5000, 10000));
  EXPECT_EQ(env.best_pair_at(4999), (DecisionPair{0, 0}));
  EXPECT_EQ(env.best_pair_at(5000), (DecisionPair{1, 0}));
  EXPECT_THROW(env.segment(10000), ModelError);
  EXPECT_FALSE(env.stationary());
}

TEST(Trace, OracleRewardIsSegmentWeighted) {
  TraceTable t;
  t.segments.push_back({0, fixtures::table_theta()});
  Grid swapped = fixtures::table_theta();
  for (int k = 0; k < 8; ++k) std::swap(swapped(1, k), swapped(2, k));
  t.segments.push_back({300, swapped});
  t.horizon = 1000;
  const auto env = trace_env(fixtures::table_rates(), t);
  double stepwise = 0;
  for (std::uint64_t n = 0; n < 1000; ++n) stepwise += env.mu_star_at(n);
  EXPECT_EQ(stepwise, 52.0 * 1000);
  EXPECT_EQ(env.best_pair_at(300), (DecisionPair{2, 5}));
}

TEST(Trace, ValidationErrors) {
  TraceTable t = two_segments(10, 5);
  EXPECT_THROW(t.validate(), ModelError);
  t = two_segments(10, 20);
  t.segments[1].start = 0;
  EXPECT_THROW(t.validate(), ModelError);
  t = two_segments(10, 20);
  t.segments[0].start = 1;
  EXPECT_THROW(t.validate(), ModelError);
  t = two_segments(10, 20);
  t.segments[1].theta = Grid(3, 1, 0.5);
  EXPECT_THROW(t.validate(), ModelError);
}

TEST(Accelerate, DividesStartsAndMergesCollapsedSegments) {
  TraceTable t;
  for (std::uint64_t s : {0, 1000, 2000}) t.segments.push_back({s, Grid(1, 1, s / 4000.0)});
  t.horizon = 3000;
  EXPECT_EQ(accelerate(t, 1).segments.size(), 3u);
  const auto a = accelerate(t, 20);
  ASSERT_EQ(a.segments.size(), 3u);
  EXPECT_EQ(a.segments[1].start, 50u);
  EXPECT_EQ(a.segments[2].start, 100u);
  EXPECT_EQ(a.horizon, 150u);

  const auto all = accelerate(t, 5000);
  ASSERT_EQ(all.segments.size(), 1u);
  EXPECT_EQ(all.segments[0].theta(0, 0), 0.5);
  EXPECT_THROW(accelerate(t, 0), ModelError);
}

TEST(Accelerate, Composes) {
  TraceTable t;
  for (std::uint64_t s : {0, 600, 1200, 3000}) t.segments.push_back({s, Grid(1, 1, s / 6000.0)});
  t.horizon = 6000;
  const auto ab = accelerate(accelerate(t, 2), 3);
  const auto direct = accelerate(t, 6);
  ASSERT_EQ(ab.segments.size(), direct.segments.size());
  for (std::size_t i = 0; i < ab.segments.size(); ++i) {
    EXPECT_EQ(ab.segments[i].start, direct.segments[i].start);
    EXPECT_EQ(ab.segments[i].theta, direct.segments[i].theta);
  }
  EXPECT_EQ(ab.horizon, direct.horizon);
}

namespace {

SyntheticDriftSpec drift_spec() {
  SyntheticDriftSpec s;
  s.rates = {6, 13, 19.5, 26, 39, 52, 58.5, 65};
  s.channels = 4;
  s.horizon = 20000;
  s.interval = 100;
  s.step_stddev = 0.4;
  s.lower = 0;
  s.upper = 30;
  s.thresholds = {2, 5, 8, 11, 15, 19, 21, 23};
  s.slope = 1.0;
  s.seed = 99;
  return s;
}

}  // namespace

TEST(SyntheticDrift, FrozenWalkIsStationary) {
  auto s = drift_spec();
  s.step_stddev = 0.0;
  s.initial = {10, 12, 20, 25};
  const auto t = synth_drift_trace(s);
  EXPECT_EQ(t.segments.size(), 1u);
  EXPECT_TRUE(synth_drift_env(s).stationary());
}

TEST(SyntheticDrift, SeedDeterminesPath) {
  const auto a = synth_drift_trace(drift_spec());
  const auto b = synth_drift_trace(drift_spec());
  ASSERT_EQ(a.segments.size(), b.segments.size());
  for (std::size_t i = 0; i < a.segments.size(); ++i) EXPECT_EQ(a.segments[i].theta, b.segments[i].theta);
  auto other = drift_spec();
  other.seed = 100;
  EXPECT_NE(synth_drift_trace(other).segments.back().theta, a.segments.back().theta);
}

TEST(SyntheticDrift, RowsStayMonotone) {
  const auto s = drift_spec();
  const auto env = synth_drift_env(s);
  for (std::uint64_t n : {std::uint64_t{0}, s.horizon / 2, s.horizon - 1}) {
    const LinkModel m(env.rates(), env.theta_at(n));
    for (bool ok : check_monotone(m)) EXPECT_TRUE(ok);
  }
}

TEST(SyntheticDrift, SpecValidation) {
  auto s = drift_spec();
  s.thresholds = {1, 2};
  EXPECT_THROW(s.validate(), ModelError);
  s = drift_spec();
  s.thresholds[3] = s.thresholds[2];
  EXPECT_THROW(s.validate(), ModelError);
  s = drift_spec();
  s.initial = {40, 1, 1, 1};
  EXPECT_THROW(s.validate(), ModelError);
}

TEST(TraceCsv, RoundTripsWithSparseUpdates) {
  const auto t = synth_drift_trace(drift_spec());
  std::stringstream ss;
  write_trace_csv(ss, t);
  const auto back = parse_trace_csv(ss, 8, t.horizon);
  ASSERT_EQ(back.segments.size(), t.segments.size());
  for (std::size_t i = 0; i < t.segments.size(); ++i) {
    EXPECT_EQ(back.segments[i].start, t.segments[i].start);
    EXPECT_EQ(back.segments[i].theta, t.segments[i].theta);
  }
}

TEST(TraceCsv, InheritsAndRejectsIncompleteFirstSegment) {
  std::istringstream ok(
      "start_step,channel,rate_index,theta\n0,1,1,0.9\n0,2,1,0.3\n50,2,1,0.95\n");
  const auto t = parse_trace_csv(ok, 1, 100);
  ASSERT_EQ(t.segments.size(), 2u);
  EXPECT_EQ(t.segments[1].theta(0, 0), 0.9);
  EXPECT_EQ(t.segments[1].theta(1, 0), 0.95);

  std::istringstream partial("start_step,channel,rate_index,theta\n0,1,1,0.9\n0,2,2,0.3\n");
  EXPECT_THROW(parse_trace_csv(partial, 2, 100), ModelError);
  std::istringstream header("start,channel,rate,theta\n0,1,1,0.9\n");
  EXPECT_THROW(parse_trace_csv(header, 1, 100), ModelError);
}
