#include "doctest.h"
#include "support/properties.hpp"

namespace {

void require(const props::Check& c) {
  INFO("cases: " << c.cases << ", failures: " << c.failures);
  INFO("first failure: " << c.first_failure);
  CHECK(c.ok());
}

}  // namespace

TEST_CASE("round trip on the corpus") { require(props::roundtrip_corpus()); }
TEST_CASE("round trip on 500 generated formulas") { require(props::roundtrip_generated(500, 1)); }
TEST_CASE("unification on 500 generated problems") { require(props::unification(500, 2)); }
TEST_CASE("normalization on 500 generated terms") { require(props::normalization(500, 3)); }
TEST_CASE("replay determinism") { require(props::replay_determinism()); }
TEST_CASE("environment freedom") { require(props::environment_freedom()); }
TEST_CASE("budget monotonicity") { require(props::budget_monotonicity()); }
TEST_CASE("linearity") { require(props::linearity()); }
TEST_CASE("role soundness") { require(props::role_soundness()); }
TEST_CASE("barrier") { require(props::barrier()); }
TEST_CASE("Horn conservativity") { require(props::horn_conservativity(100, 4)); }
