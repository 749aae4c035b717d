#pragma once

#include <vector>

#include "fhmdp/mdp.hpp"
#include "fhmdp/rng.hpp"

namespace fhmdp::ode {

enum class FieldKind { h, h_infinity };

// Mean update field of the learner: for n < N,
//   h_n(i,a,q) = sum_j p_n(i,a,j) (g_n(i,a,j) + min_b q_{n+1}(j,b)) - q_n(i,a),
// zero on the terminal layer. Vanishes exactly at the optimal table.
QTable h_field(const FiniteHorizonMdp& mdp, const QTable& q);

// Scaled limit of h: the same field with every cost dropped. Vanishes at the
// origin; equals lim h(r q)/r as r grows.
QTable h_infinity_field(const FiniteHorizonMdp& mdp, const QTable& q);

struct FieldProbeReport {
  FieldKind field_kind = FieldKind::h;
  int trials = 0;
  double max_ratio = 0.0;
};

// Empirical sup-norm Lipschitz ratio of the chosen field over random table
// pairs drawn entrywise from [-radius, radius]. The analytic constant for
// both fields is 2; the probe can approach it but never exceed it beyond
// rounding.
FieldProbeReport lipschitz_probe(const FiniteHorizonMdp& mdp, FieldKind kind,
                                 int trials, double radius, Rng& rng);

struct EulerFlowResult {
  QTable final_q;
  std::vector<double> distance;  // to the field's equilibrium, after each step
};

// Explicit Euler iteration q <- q + dt * field(q), measured against the
// exact solution for h and against the origin for h_infinity. Terminal
// components are fixed points of both fields, so q0 should carry the
// equilibrium's terminal layer (terminal costs for h, zeros for h_infinity)
// for the distance to reach zero.
EulerFlowResult euler_flow(const FiniteHorizonMdp& mdp, const QTable& q0,
                           FieldKind kind, double dt, int steps);

struct NoiseComponentStats {
  int n = 0;
  int i = 0;
  int a = 0;
  double mean = 0.0;
  double second_moment = 0.0;
};

struct NoiseProbeReport {
  long samples = 0;
  double q_sup = 0.0;
  double bound_constant = 0.0;  // C in E[M^2] <= C (1 + q_sup^2)
  std::vector<NoiseComponentStats> components;
  int mean_test_failures = 0;         // |mean| > 4 sd / sqrt(samples)
  int second_moment_failures = 0;     // second moment > C (1 + q_sup^2)
};

// Monte Carlo probe of the per-update noise at a frozen table:
//   M(n,i,a) = (g + min-next at a sampled j) - E[g + min-next].
// Zero-mean by construction, with second moment at most C (1 + sup|q|^2)
// for C = 2 (sup|g| + 1)^2 + 2. Terminal components are identically zero
// and reported as such.
NoiseProbeReport martingale_noise_probe(const FiniteHorizonMdp& mdp,
                                        const QTable& q, long samples,
                                        Rng& rng);

}  // namespace fhmdp::ode
