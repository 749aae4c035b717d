#include <cmath>
#include <stdexcept>

#include <doctest.h>

#include "fhmdp/io.hpp"
#include "fhmdp/mdp.hpp"
#include "fhmdp/random_mdp.hpp"

using namespace fhmdp;

TEST_CASE("random_mdp: generated instances are valid with tight row sums") {
  FiniteHorizonMdp mdp = generate_random_mdp({5, 20, 4, 0.0, 1.0, 0.0, 1.0, 1});
  CHECK(validate(mdp).empty());
  for (int n = 0; n < mdp.horizon(); ++n)
    for (int i = 0; i < mdp.num_states(); ++i)
      for (int a = 0; a < mdp.num_actions(); ++a) {
        double sum = 0.0;
        for (int j = 0; j < mdp.num_states(); ++j)
          sum += mdp.transition(n, i, a, j);
        CHECK(std::abs(sum - 1.0) <= 1e-12);
      }
}

TEST_CASE("random_mdp: every action is feasible everywhere") {
  FiniteHorizonMdp mdp = generate_random_mdp({2, 5, 3, 0.0, 1.0, 0.0, 1.0, 2});
  for (int i = 0; i < mdp.num_states(); ++i) {
    REQUIRE(mdp.feasible_actions(i).size() == 3);
    for (int a = 0; a < 3; ++a) CHECK(mdp.feasible_actions(i)[a] == a);
  }
}

TEST_CASE("random_mdp: kernels have full support") {
  FiniteHorizonMdp mdp = generate_random_mdp({3, 6, 2, 0.0, 1.0, 0.0, 1.0, 3});
  for (int n = 0; n < mdp.horizon(); ++n)
    for (int i = 0; i < mdp.num_states(); ++i)
      for (int a = 0; a < mdp.num_actions(); ++a)
        for (int j = 0; j < mdp.num_states(); ++j)
          CHECK(mdp.transition(n, i, a, j) > 0.0);
}

TEST_CASE("random_mdp: identical specs give identical instances") {
  RandomMdpSpec spec{3, 4, 2, -0.5, 1.5, 0.0, 2.0, 99};
  FiniteHorizonMdp a = generate_random_mdp(spec);
  FiniteHorizonMdp b = generate_random_mdp(spec);
  CHECK(io::mdp_to_json(a).dump() == io::mdp_to_json(b).dump());
  spec.seed = 100;
  FiniteHorizonMdp c = generate_random_mdp(spec);
  CHECK(io::mdp_to_json(a).dump() != io::mdp_to_json(c).dump());
}

TEST_CASE("random_mdp: cost ranges do not disturb the kernel draws") {
  RandomMdpSpec cheap{3, 4, 2, 0.0, 1.0, 0.0, 1.0, 50};
  RandomMdpSpec pricey = cheap;
  pricey.cost_low = 5.0;
  pricey.cost_high = 9.0;
  FiniteHorizonMdp a = generate_random_mdp(cheap);
  FiniteHorizonMdp b = generate_random_mdp(pricey);
  for (int n = 0; n < a.horizon(); ++n)
    for (int i = 0; i < a.num_states(); ++i)
      for (int x = 0; x < a.num_actions(); ++x)
        for (int j = 0; j < a.num_states(); ++j)
          CHECK(a.transition(n, i, x, j) == b.transition(n, i, x, j));
}

TEST_CASE("random_mdp: costs land in the requested ranges") {
  FiniteHorizonMdp mdp = generate_random_mdp({3, 4, 2, 2.0, 3.0, -1.0, -1.0, 4});
  for (int n = 0; n < mdp.horizon(); ++n)
    for (int i = 0; i < mdp.num_states(); ++i)
      for (int a = 0; a < mdp.num_actions(); ++a)
        for (int j = 0; j < mdp.num_states(); ++j) {
          CHECK(mdp.stage_cost(n, i, a, j) >= 2.0);
          CHECK(mdp.stage_cost(n, i, a, j) < 3.0);
        }
  // Degenerate range pins the value exactly.
  for (int i = 0; i < mdp.num_states(); ++i)
    CHECK(mdp.terminal_cost(i) == -1.0);
}

TEST_CASE("random_mdp: single-state kernels are exactly one") {
  FiniteHorizonMdp mdp = generate_random_mdp({4, 1, 3, 0.0, 1.0, 0.0, 1.0, 5});
  for (int n = 0; n < 4; ++n)
    for (int a = 0; a < 3; ++a) CHECK(mdp.transition(n, 0, a, 0) == 1.0);
}

TEST_CASE("random_mdp: invalid specs are rejected") {
  CHECK_THROWS_AS(generate_random_mdp({0, 2, 2, 0.0, 1.0, 0.0, 1.0, 1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(generate_random_mdp({2, 0, 2, 0.0, 1.0, 0.0, 1.0, 1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(generate_random_mdp({2, 2, 0, 0.0, 1.0, 0.0, 1.0, 1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(generate_random_mdp({2, 2, 2, 1.0, 0.0, 0.0, 1.0, 1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(generate_random_mdp({2, 2, 2, 0.0, 1.0, 1.0, 0.0, 1}),
                  std::invalid_argument);
}
