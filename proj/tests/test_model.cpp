#include <gtest/gtest.h>

#include "chanrate/model.hpp"
#include "reference_table.hpp"

using namespace chanrate;

TEST(RateSet, RejectsUnorderedOrNonPositiveRates) {
  EXPECT_THROW(RateSet({}), ModelError);
  EXPECT_THROW(RateSet({2, 1}), ModelError);
  EXPECT_THROW(RateSet({1, 1}), ModelError);
  EXPECT_THROW(RateSet({0, 1}), ModelError);
  EXPECT_NO_THROW(RateSet({0.5}));
}

TEST(LinkModel, ValidatesShapeProbabilitiesAndOccupancy) {
  const RateSet r({1, 2});
  EXPECT_THROW(LinkModel(r, Grid(1, 3, 0.5)), ModelError);
  EXPECT_THROW(LinkModel(r, Grid(1, 2, 1.5)), ModelError);
  EXPECT_THROW(LinkModel(r, Grid(0, 2)), ModelError);
  EXPECT_THROW(LinkModel(r, Grid(2, 2, 0.5), std::vector<double>{0.1}), ModelError);
  EXPECT_THROW(LinkModel(r, Grid(1, 2, 0.5), std::vector<double>{-0.1}), ModelError);
}

TEST(Throughput, MatchesTableEntries) {
  const Grid mu = throughput_matrix(fixtures::table_model());
  EXPECT_DOUBLE_EQ(mu(1, 5), 52.0);
  EXPECT_DOUBLE_EQ(mu(4, 2), 15.6);
  for (int k = 0; k < 8; ++k) EXPECT_EQ(mu(3, k), 0.0);
  EXPECT_DOUBLE_EQ(mu(1, 6), 40.95);
}

TEST(Throughput, OccupancyScalesSuccessProbability) {
  const RateSet r({1, 2});
  const Grid theta(2, 2, {0.9, 0.5, 0.8, 0.4});
  const LinkModel zero(r, theta, std::vector<double>{0.0, 0.0});
  EXPECT_EQ(throughput_matrix(zero), throughput_matrix(LinkModel(r, theta)));

  const LinkModel busy(r, theta, std::vector<double>{0.5, 0.25});
  const Grid mu = throughput_matrix(busy);
  EXPECT_DOUBLE_EQ(mu(0, 0), 0.45);
  EXPECT_DOUBLE_EQ(mu(1, 1), 2 * 0.75 * 0.4);
}

TEST(Optima, TableBestPairAndIndexSets) {
  const OptimaSummary opt = compute_optima(fixtures::table_model());
  EXPECT_EQ(opt.best, (DecisionPair{1, 5}));
  EXPECT_EQ(opt.mu_star, 52.0);
  EXPECT_TRUE(opt.unique_global);
  EXPECT_EQ(opt.first_needed, 5);  // rate 52, one-based index 6
  EXPECT_EQ(opt.needed, (std::vector<int>{5, 6, 7}));
  EXPECT_EQ(opt.neighbours, (std::vector<int>{6}));
  EXPECT_FALSE(opt.per_channel[3].unique);
  EXPECT_EQ(opt.per_channel[3].rate, 0);
  EXPECT_TRUE(opt.per_channel[0].unique);
  EXPECT_EQ(opt.per_channel[4].rate, 2);
}

TEST(Optima, SingleArm) {
  const OptimaSummary opt = compute_optima(LinkModel(RateSet({3}), Grid(1, 1, 1.0)));
  EXPECT_EQ(opt.best, (DecisionPair{0, 0}));
  EXPECT_EQ(opt.mu_star, 3.0);
  EXPECT_EQ(opt.needed, (std::vector<int>{0}));
  EXPECT_TRUE(opt.neighbours.empty());
}

TEST(Optima, NeededSetIsRateSuffix) {
  const OptimaSummary opt = compute_optima(LinkModel(RateSet({1, 2, 4}), Grid(1, 3, {1.0, 0.9, 0.2})));
  EXPECT_DOUBLE_EQ(opt.mu_star, 1.8);
  EXPECT_EQ(opt.first_needed, 1);
  EXPECT_EQ(opt.needed, (std::vector<int>{1, 2}));
  for (int k : opt.needed) EXPECT_LE(opt.mu_star, RateSet({1, 2, 4})[k]);
  EXPECT_GT(opt.mu_star, 1.0);
}

TEST(Optima, ExactTieIsFlaggedAndBrokenLexicographically) {
  const OptimaSummary opt = compute_optima(LinkModel(RateSet({1, 2}), Grid(2, 2, {0.5, 0.5, 1.0, 0.1})));
  EXPECT_FALSE(opt.unique_global);
  EXPECT_EQ(opt.best, (DecisionPair{0, 1}));
  EXPECT_EQ(opt.mu_star, 1.0);
}

TEST(Optima, PureAndDeterministic) {
  const auto a = compute_optima(fixtures::table_model());
  const auto b = compute_optima(fixtures::table_model());
  EXPECT_EQ(a.mu, b.mu);
  EXPECT_EQ(a.best, b.best);
  EXPECT_EQ(a.needed, b.needed);
}

TEST(DecisionPair, PrintsOneBased) { EXPECT_EQ(to_string(DecisionPair{1, 5}), "(2,6)"); }
