#include <gtest/gtest.h>

#include "property_checks.hpp"

namespace {

void expect(const props::Outcome& o) {
  EXPECT_TRUE(o.pass) << o.name << ": " << o.detail;
  std::printf("  %s: %s (%.1f s)\n", o.name.c_str(), o.detail.c_str(), o.seconds);
}

}  // namespace

TEST(Properties, NonnegativeAndMonotone) { expect(props::monotonicity()); }
TEST(Properties, SharpLipschitz) { expect(props::lipschitz()); }
TEST(Properties, FlatHomogeneity) { expect(props::flat_homogeneity()); }
TEST(Properties, WitnessReproduction) { expect(props::witness_reproduction()); }
TEST(Properties, GridOracle) { expect(props::grid_agreement()); }
TEST(Properties, NetCoversDangerousSet) { expect(props::net_property()); }
TEST(Properties, BicolorK4) { expect(props::k4_oracle()); }
TEST(Properties, ToleranceInflationNeverProvesMore) { expect(props::soundness_audit()); }
