#include <gtest/gtest.h>

#include "rideshare/suites.hpp"

using namespace rideshare;
using namespace rideshare::suites;

namespace {

SuiteConfig small(std::size_t cases) {
  SuiteConfig cfg;
  cfg.seed = 99;
  cfg.cases = cases;
  return cfg;
}

}  // namespace

TEST(Suites, PassengerPasses) {
  const SuiteResult r = run_passenger_suite(small(200));
  EXPECT_TRUE(r.passed());
  for (const auto& c : r.checks) EXPECT_EQ(c.cases, 200u) << c.name;
}

TEST(Suites, DriverPasses) {
  SuiteConfig cfg = small(60);
  cfg.resolution = 0.02;
  const SuiteResult r = run_driver_suite(cfg);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.notes.size(), 5u);
}

TEST(Suites, Theorem1Passes) { EXPECT_TRUE(run_theorem1_suite(small(200)).passed()); }

TEST(Suites, ConstantResponseGridPasses) {
  const SuiteResult r = run_constant_response_suite(small(1));
  EXPECT_TRUE(r.passed());
  ASSERT_EQ(r.checks.size(), 2u);
  EXPECT_EQ(r.checks[0].cases, 10000u);
}

TEST(Suites, CompetitionDecisionFailsConstancyButIsConsistent) {
  SuiteConfig cfg = small(1);
  cfg.market = {1.0, 1.0, 2.0};
  cfg.decision = PlatformDecision{2.0, 1.5, 3.0, 2.0};
  const SuiteResult r = run_constant_response_suite(cfg);
  ASSERT_GE(r.checks.size(), 2u);
  EXPECT_FALSE(r.checks[0].ok());
  EXPECT_GT(r.checks[0].worst, 0.0);
  EXPECT_TRUE(r.checks[1].ok());
  EXPECT_FALSE(r.passed());
}

TEST(Suites, DeterministicForSeed) {
  const SuiteResult a = run_passenger_suite(small(50));
  const SuiteResult b = run_passenger_suite(small(50));
  for (std::size_t i = 0; i < a.checks.size(); ++i) EXPECT_EQ(a.checks[i].worst, b.checks[i].worst);
}

TEST(Suites, NamesAndAll) {
  EXPECT_TRUE(is_suite_name("all"));
  EXPECT_FALSE(is_suite_name("everything"));
  SuiteConfig cfg = small(10);
  cfg.resolution = 0.05;
  EXPECT_EQ(run_suite("all", cfg).size(), 4u);
  EXPECT_EQ(run_suite("theorem1", cfg).size(), 1u);
}
