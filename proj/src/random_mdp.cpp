#include "fhmdp/random_mdp.hpp"

#include <numeric>
#include <stdexcept>

#include "fhmdp/rng.hpp"

namespace fhmdp {

FiniteHorizonMdp generate_random_mdp(const RandomMdpSpec& spec) {
  if (spec.horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (spec.num_states < 1)
    throw std::invalid_argument("num_states must be >= 1");
  if (spec.num_actions < 1)
    throw std::invalid_argument("num_actions must be >= 1");
  if (spec.cost_high < spec.cost_low)
    throw std::invalid_argument("cost range is inverted");
  if (spec.terminal_cost_high < spec.terminal_cost_low)
    throw std::invalid_argument("terminal cost range is inverted");

  int N = spec.horizon;
  int S = spec.num_states;
  int A = spec.num_actions;
  std::vector<int> all_actions(static_cast<std::size_t>(A));
  std::iota(all_actions.begin(), all_actions.end(), 0);
  std::vector<std::vector<int>> feasible(static_cast<std::size_t>(S),
                                         all_actions);

  std::size_t table_size =
      static_cast<std::size_t>(N) * S * A * static_cast<std::size_t>(S);
  std::vector<double> transition(table_size);
  std::vector<double> stage_cost(table_size);
  std::vector<double> terminal_cost(static_cast<std::size_t>(S));

  // Fixed draw order: per (n,i,a) one kernel row then its costs, then the
  // terminal costs. Anything else would silently change seeded instances.
  Rng rng(spec.seed);
  std::size_t base = 0;
  for (int n = 0; n < N; ++n) {
    for (int i = 0; i < S; ++i) {
      for (int a = 0; a < A; ++a) {
        double total = 0.0;
        for (int j = 0; j < S; ++j) {
          double e = rng.next_exponential();
          transition[base + static_cast<std::size_t>(j)] = e;
          total += e;
        }
        for (int j = 0; j < S; ++j)
          transition[base + static_cast<std::size_t>(j)] /= total;
        for (int j = 0; j < S; ++j)
          stage_cost[base + static_cast<std::size_t>(j)] =
              rng.next_uniform(spec.cost_low, spec.cost_high);
        base += static_cast<std::size_t>(S);
      }
    }
  }
  for (int i = 0; i < S; ++i)
    terminal_cost[static_cast<std::size_t>(i)] =
        rng.next_uniform(spec.terminal_cost_low, spec.terminal_cost_high);

  return FiniteHorizonMdp(N, S, A, std::move(feasible), std::move(transition),
                          std::move(stage_cost), std::move(terminal_cost));
}

}  // namespace fhmdp
