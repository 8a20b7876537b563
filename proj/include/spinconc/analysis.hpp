#pragma once

#include <cstdint>
#include <vector>

#include "spinconc/protocol.hpp"

namespace spinconc {

/// P(charge detector reads One) for a source with s = |α|²: 2·s·(1−s).
double success_probability(double s);

/// Coefficient recursion of the failure branch: s' = s²/(s² + (1−s)²).
/// The exact endpoints are rejected: failure there is deterministic and the
/// recycled pair carries no entanglement.
double next_s(double s);

struct YieldRow {
  int round;                // k, 1-based
  double s;                 // s_k entering round k
  double p;                 // 2·s_k·(1−s_k)
  double cumulative_yield;  // maximal pairs per source pair through round k
};

struct YieldReport {
  double s0;
  int max_rounds;
  std::vector<YieldRow> per_round;
  double total_yield;     // Σ_k p_k · Π_{j<k}(1−p_j) / 2^k
  double baseline_yield;  // p₁/2: single round, failures discarded
};

/// Expected maximal pairs per initial source pair when failed rounds are
/// recycled, for up to max_rounds rounds. Each round consumes two pairs of
/// the current generation: a success turns them into one maximal pair, a
/// failure into one next-generation pair.
YieldReport iterated_yield(double s0, int max_rounds);

struct MonteCarloReport {
  std::int64_t trials;
  std::uint64_t seed;
  int max_rounds;
  std::vector<std::int64_t> success_counts_per_round;  // index k−1
  std::int64_t unresolved;  // trajectories with no success within max_rounds
  double estimated_yield;
  double standard_error;  // of estimated_yield, from the sample variance
};

/// Samples `trials` independent trajectories through the full state-vector
/// pipeline. Trial i draws from RandomSource::for_stream(seed, i), so the
/// report is a pure function of (s0, trials, max_rounds, seed) and trials
/// may be partitioned across workers without changing the result.
MonteCarloReport monte_carlo(double s0, std::int64_t trials, int max_rounds,
                             std::uint64_t seed);

}  // namespace spinconc
