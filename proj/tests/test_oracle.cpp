#include <gtest/gtest.h>

#include <cmath>

#include "rideshare/oracle.hpp"

using namespace rideshare;

TEST(PassengerOracle, SymmetricExample) {
  const PassengerSplit s = oracle::passenger_oracle({0.5, 0.5}, {1.0, 0.0, 1.0, 0.0}, {1.0, 0.0, 1.0}, 0.01);
  EXPECT_NEAR(s.p_u, 0.25, 0.01);
  EXPECT_NEAR(s.p_l, 0.25, 0.01);
  EXPECT_NEAR(s.p_p, 0.5, 0.01);
}

TEST(PassengerOracle, ZeroAvailabilityGetsZeroShare) {
  for (double r : {0.0, 0.5, 2.0}) {
    const PassengerSplit s = oracle::passenger_oracle({0.0, 0.4}, {r, 0.0, 1.0, 0.0}, {1.0, 0.0, 1.0}, 0.02);
    EXPECT_EQ(s.p_u, 0.0);
  }
}

TEST(PassengerOracle, ResolutionValidated) {
  EXPECT_THROW(oracle::passenger_oracle({0.5, 0.5}, {}, {1.0, 0.0, 1.0}, 0.0), DomainError);
  EXPECT_THROW(oracle::passenger_oracle({0.5, 0.5}, {}, {1.0, 0.0, 1.0}, 0.2), DomainError);
}

TEST(PassengerOracle, DirectCostMatchesModelCost) {
  const MarketParams m{0.6, 0.0, 1.7};
  const PlatformDecision dec{0.8, 0.0, 1.1, 0.0};
  const DriverAllocation alloc{0.3, 0.45};
  EXPECT_NEAR(oracle::direct_passenger_cost(0.2, 0.3, 0.5, alloc, dec, m),
              passenger_cost({0.2, 0.3, 0.5}, alloc, dec, m), 1e-14);
}

TEST(DriverOracle, MonopolyExample) {
  const DriverAllocation a = oracle::driver_oracle({1.0, 2.0, 2.0, 1.5}, {1.0, 1.0, 2.0}, 0.01);
  EXPECT_NEAR(a.a_u, 0.5, 0.01);
  EXPECT_EQ(a.a_l, 0.0);
}

TEST(DriverOracle, NegativeMargins) {
  const DriverAllocation a = oracle::driver_oracle({2.0, 0.5, 2.0, 0.8}, {1.0, 1.0, 3.0}, 0.02);
  EXPECT_EQ(a.a_u, 0.0);
  EXPECT_EQ(a.a_l, 0.0);
}

TEST(DriverOracle, ConstantResponseIsFlatOnTheSlice) {
  const MarketParams m{1.0, 1.0, 3.0};
  const PlatformDecision dec{2.0, 1.2, 2.0, 1.2};
  const double total = 0.5;
  double lo = INFINITY;
  double hi = -INFINITY;
  for (int k = 0; k <= 50; ++k) {
    const double a_u = total * k / 50.0;
    const PassengerSplit s = passenger_best_response({a_u, total - a_u}, dec, m);
    const double v = s.p_u * 0.2 + s.p_l * 0.2;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  EXPECT_LE(hi - lo, 1e-9);
}

TEST(DriverOracle, SearchReportsFeasiblePoints) {
  const auto res = oracle::driver_oracle_search({2.0, 1.2, 2.0, 1.2}, {1.0, 1.0, 3.0}, 0.05);
  EXPECT_GT(res.feasible_points, 0u);
  EXPECT_LT(res.feasible_points, 21u * 21u);
  EXPECT_NEAR(res.profit, 0.1, 1e-12);
}

TEST(SecondDifference, Parabola) {
  EXPECT_NEAR(oracle::second_difference([](double x) { return 3.0 * x * x + x; }, 0.4, 0.01), 6.0 * 1e-4, 1e-15);
}

TEST(QuadraticCheck, AnyDecisionIsQuadratic) {
  const MarketParams m{0.7, 0.3, 2.2};
  for (const PlatformDecision dec : {PlatformDecision{0.5, 1.0, 2.0, 0.6}, PlatformDecision{1.9, 0.3, 0.1, 2.5}}) {
    const auto q = oracle::quadratic_check(dec, m, 0.8, 1e-3);
    EXPECT_TRUE(q.is_quadratic);
    EXPECT_NEAR(q.curvature, allocation_hessian(dec, m, 0.8), 1e-6);
  }
}

TEST(QuadraticCheck, ConstantResponseHasNoCurvature) {
  const auto q = oracle::quadratic_check({2.0, 1.2, 2.0, 1.2}, {1.0, 1.0, 3.0}, 0.5, 1e-3);
  EXPECT_LE(std::abs(q.curvature), 1e-9);
}

TEST(QuadraticCheck, StepMustBeSmall) {
  EXPECT_THROW(oracle::quadratic_check({2.0, 1.2, 2.0, 1.2}, {1.0, 1.0, 3.0}, 0.5, 0.2), DomainError);
  EXPECT_THROW(oracle::quadratic_check({2.0, 1.2, 2.0, 1.2}, {1.0, 1.0, 3.0}, 0.5, 0.0), DomainError);
}

TEST(ParticipationByIteration, MonopolyFixedPoint) {
  const MarketParams m{1.0, 1.0, 2.0};
  for (double start : {0.05, 0.5, 1.0})
    EXPECT_NEAR(oracle::participation_by_iteration({1.0, 2.0, 2.0, 1.5}, m, 1.0, start), 0.5, 1e-9);
}
