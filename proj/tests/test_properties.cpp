#include "properties.hpp"

#include <gtest/gtest.h>

namespace {

constexpr std::uint64_t kSeed = 20240611;
constexpr std::uint64_t kCases = 10'000;

void expect_ok(const props::Outcome& o) {
  EXPECT_EQ(o.cases, kCases) << o.name;
  EXPECT_EQ(o.failures, 0u) << o.name << ": " << o.first_failure;
}

}  // namespace

TEST(Properties, RestrictionAveraging) { expect_ok(props::restriction_averaging(kSeed, kCases)); }
TEST(Properties, MeetEntropy) { expect_ok(props::meet_entropy(kSeed, kCases)); }
TEST(Properties, RealisationCount) { expect_ok(props::realisation_count(kSeed, kCases)); }
TEST(Properties, Monotonicity) { expect_ok(props::monotonicity(kSeed, kCases)); }
TEST(Properties, BadPairsOracle) { expect_ok(props::bad_pairs_oracle(kSeed, kCases)); }
TEST(Properties, EncodingRoundTrips) { expect_ok(props::encoding_round_trips(kSeed, kCases)); }
TEST(Properties, MetricAxioms) { expect_ok(props::metric_axioms(kSeed, kCases)); }

// A second seed, so a lucky stream cannot hide a failure.
TEST(Properties, SecondSeedSmoke) {
  for (const auto& check : props::all()) {
    props::Outcome o = check(7, 500);
    EXPECT_TRUE(o.ok()) << o.name << ": " << o.first_failure;
  }
}
