#include "fhmdp/dp.hpp"

#include <stdexcept>
#include <vector>

namespace fhmdp::dp {

QTable backup(const FiniteHorizonMdp& mdp, const QTable& q) {
  if (!q.shaped_for(mdp)) throw std::invalid_argument("q not shaped for mdp");
  int N = mdp.horizon();
  int S = mdp.num_states();
  QTable out = zeros_like(mdp);
  for (int i = 0; i < S; ++i)
    for (int a : mdp.feasible_actions(i)) out.at(N, i, a) = mdp.terminal_cost(i);
  std::vector<double> next_value(static_cast<std::size_t>(S));
  for (int n = N - 1; n >= 0; --n) {
    for (int j = 0; j < S; ++j)
      next_value[static_cast<std::size_t>(j)] = min_over_actions(mdp, q, n + 1, j);
    for (int i = 0; i < S; ++i) {
      for (int a : mdp.feasible_actions(i)) {
        double value = 0.0;
        for (int j = 0; j < S; ++j)
          value += mdp.transition(n, i, a, j) *
                   (mdp.stage_cost(n, i, a, j) +
                    next_value[static_cast<std::size_t>(j)]);
        out.at(n, i, a) = value;
      }
    }
  }
  return out;
}

QTable solve(const FiniteHorizonMdp& mdp) {
  std::vector<std::string> violations = validate(mdp);
  if (!violations.empty())
    throw std::invalid_argument("invalid mdp: " + violations.front());
  int N = mdp.horizon();
  int S = mdp.num_states();
  QTable q = initial_q(mdp);
  std::vector<double> next_value(static_cast<std::size_t>(S));
  for (int n = N - 1; n >= 0; --n) {
    for (int j = 0; j < S; ++j)
      next_value[static_cast<std::size_t>(j)] = min_over_actions(mdp, q, n + 1, j);
    for (int i = 0; i < S; ++i) {
      for (int a : mdp.feasible_actions(i)) {
        double value = 0.0;
        for (int j = 0; j < S; ++j)
          value += mdp.transition(n, i, a, j) *
                   (mdp.stage_cost(n, i, a, j) +
                    next_value[static_cast<std::size_t>(j)]);
        q.at(n, i, a) = value;
      }
    }
  }
  return q;
}

double bellman_residual(const FiniteHorizonMdp& mdp, const QTable& q) {
  return sup_diff(q, backup(mdp, q));
}

}  // namespace fhmdp::dp
