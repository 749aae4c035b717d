#include "fhmdp/ode_checks.hpp"

#include <cmath>
#include <stdexcept>

#include "fhmdp/dp.hpp"
#include "fhmdp/qlearning.hpp"

namespace fhmdp::ode {

namespace {

// Shared shape of both fields; with_costs distinguishes h from h_infinity.
QTable field_impl(const FiniteHorizonMdp& mdp, const QTable& q,
                  bool with_costs) {
  if (!q.shaped_for(mdp)) throw std::invalid_argument("q not shaped for mdp");
  int N = mdp.horizon();
  int S = mdp.num_states();
  QTable out = zeros_like(mdp);
  std::vector<double> next_value(static_cast<std::size_t>(S));
  for (int n = N - 1; n >= 0; --n) {
    for (int j = 0; j < S; ++j)
      next_value[static_cast<std::size_t>(j)] =
          min_over_actions(mdp, q, n + 1, j);
    for (int i = 0; i < S; ++i) {
      for (int a : mdp.feasible_actions(i)) {
        double value = 0.0;
        for (int j = 0; j < S; ++j) {
          double inner = next_value[static_cast<std::size_t>(j)];
          if (with_costs) inner += mdp.stage_cost(n, i, a, j);
          value += mdp.transition(n, i, a, j) * inner;
        }
        out.at(n, i, a) = value - q.at(n, i, a);
      }
    }
  }
  return out;
}

void fill_uniform(const FiniteHorizonMdp& mdp, QTable& q, double radius,
                  Rng& rng) {
  for (int n = 0; n < q.num_stages(); ++n)
    for (int i = 0; i < mdp.num_states(); ++i)
      for (int a : mdp.feasible_actions(i))
        q.at(n, i, a) = rng.next_uniform(-radius, radius);
}

}  // namespace

QTable h_field(const FiniteHorizonMdp& mdp, const QTable& q) {
  return field_impl(mdp, q, true);
}

QTable h_infinity_field(const FiniteHorizonMdp& mdp, const QTable& q) {
  return field_impl(mdp, q, false);
}

FieldProbeReport lipschitz_probe(const FiniteHorizonMdp& mdp, FieldKind kind,
                                 int trials, double radius, Rng& rng) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
  FieldProbeReport report;
  report.field_kind = kind;
  report.trials = trials;
  QTable qa = zeros_like(mdp);
  QTable qb = zeros_like(mdp);
  for (int t = 0; t < trials; ++t) {
    double denom = 0.0;
    do {
      fill_uniform(mdp, qa, radius, rng);
      fill_uniform(mdp, qb, radius, rng);
      denom = sup_diff(qa, qb);
    } while (denom == 0.0);
    QTable fa = kind == FieldKind::h ? h_field(mdp, qa)
                                     : h_infinity_field(mdp, qa);
    QTable fb = kind == FieldKind::h ? h_field(mdp, qb)
                                     : h_infinity_field(mdp, qb);
    double ratio = sup_diff(fa, fb) / denom;
    if (ratio > report.max_ratio) report.max_ratio = ratio;
  }
  return report;
}

EulerFlowResult euler_flow(const FiniteHorizonMdp& mdp, const QTable& q0,
                           FieldKind kind, double dt, int steps) {
  if (!q0.shaped_for(mdp)) throw std::invalid_argument("q0 not shaped for mdp");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (steps < 1) throw std::invalid_argument("steps must be >= 1");
  QTable target =
      kind == FieldKind::h ? dp::solve(mdp) : zeros_like(mdp);
  EulerFlowResult result{q0, {}};
  result.distance.reserve(static_cast<std::size_t>(steps));
  for (int step = 0; step < steps; ++step) {
    QTable field = kind == FieldKind::h
                       ? h_field(mdp, result.final_q)
                       : h_infinity_field(mdp, result.final_q);
    for (std::size_t k = 0; k < field.values().size(); ++k)
      result.final_q.values()[k] += dt * field.values()[k];
    result.distance.push_back(sup_diff(result.final_q, target));
  }
  return result;
}

NoiseProbeReport martingale_noise_probe(const FiniteHorizonMdp& mdp,
                                        const QTable& q, long samples,
                                        Rng& rng) {
  if (!q.shaped_for(mdp)) throw std::invalid_argument("q not shaped for mdp");
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  int N = mdp.horizon();
  int S = mdp.num_states();
  NoiseProbeReport report;
  report.samples = samples;
  report.q_sup = sup_norm(q);
  double g_sup = mdp.max_abs_stage_cost();
  report.bound_constant = 2.0 * (g_sup + 1.0) * (g_sup + 1.0) + 2.0;
  double moment_bound =
      report.bound_constant * (1.0 + report.q_sup * report.q_sup);

  fhql::TransitionSampler sampler(mdp);
  std::vector<double> next_value(static_cast<std::size_t>(S));
  for (int n = 0; n < N; ++n) {
    for (int j = 0; j < S; ++j)
      next_value[static_cast<std::size_t>(j)] =
          min_over_actions(mdp, q, n + 1, j);
    for (int i = 0; i < S; ++i) {
      for (int a : mdp.feasible_actions(i)) {
        double expected = 0.0;
        for (int j = 0; j < S; ++j)
          expected += mdp.transition(n, i, a, j) *
                      (mdp.stage_cost(n, i, a, j) +
                       next_value[static_cast<std::size_t>(j)]);
        double sum = 0.0;
        double sum_sq = 0.0;
        for (long s = 0; s < samples; ++s) {
          int j = sampler.sample(n, i, a, rng);
          double noise = mdp.stage_cost(n, i, a, j) +
                         next_value[static_cast<std::size_t>(j)] - expected;
          sum += noise;
          sum_sq += noise * noise;
        }
        NoiseComponentStats stats;
        stats.n = n;
        stats.i = i;
        stats.a = a;
        stats.mean = sum / static_cast<double>(samples);
        stats.second_moment = sum_sq / static_cast<double>(samples);
        double variance =
            std::max(0.0, stats.second_moment - stats.mean * stats.mean);
        double mean_gate =
            4.0 * std::sqrt(variance / static_cast<double>(samples));
        if (std::abs(stats.mean) > mean_gate) ++report.mean_test_failures;
        if (stats.second_moment > moment_bound)
          ++report.second_moment_failures;
        report.components.push_back(stats);
      }
    }
  }
  // Terminal components carry no noise by definition.
  for (int i = 0; i < S; ++i)
    for (int a : mdp.feasible_actions(i))
      report.components.push_back({N, i, a, 0.0, 0.0});
  return report;
}

}  // namespace fhmdp::ode
