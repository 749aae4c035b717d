#pragma once

#include "fhmdp/mdp.hpp"

namespace fhmdp::dp {

// One exact Bellman backup of q. For n < N:
//   backup(q)_n(i,a) = sum_j p_n(i,a,j) (g_n(i,a,j) + min_b q_{n+1}(j,b)),
// and the terminal layer maps to the terminal cost.
QTable backup(const FiniteHorizonMdp& mdp, const QTable& q);

// Exact optimal Q-values by a single backward sweep. Throws
// std::invalid_argument if the instance fails validation.
QTable solve(const FiniteHorizonMdp& mdp);

// Sup norm of q - backup(q) over the whole table. Zero exactly at the
// solution; a perturbation of a stage-n entry shows up at that entry and
// nowhere else, since backups read only stage n+1.
double bellman_residual(const FiniteHorizonMdp& mdp, const QTable& q);

}  // namespace fhmdp::dp
