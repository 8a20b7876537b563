#include "spinconc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace spinconc {

double success_probability(double s) {
  if (!(s >= 0.0 && s <= 1.0)) {
    throw Error(ErrorCode::Domain, "s = " + std::to_string(s) + " outside [0, 1]");
  }
  return 2.0 * s * (1.0 - s);
}

double next_s(double s) {
  if (!(s > 0.0 && s < 1.0)) {
    throw Error(ErrorCode::Domain,
                "coefficient recursion undefined for s = " + std::to_string(s));
  }
  return s * s / (s * s + (1.0 - s) * (1.0 - s));
}

YieldReport iterated_yield(double s0, int max_rounds) {
  if (!(s0 >= 0.0 && s0 <= 1.0)) {
    throw Error(ErrorCode::Domain, "s0 = " + std::to_string(s0) + " outside [0, 1]");
  }
  if (max_rounds < 1) {
    throw Error(ErrorCode::Domain, "max_rounds must be at least 1");
  }

  YieldReport report{s0, max_rounds, {}, 0.0, 0.0};
  report.per_round.reserve(static_cast<std::size_t>(max_rounds));

  double s = s0;
  double survival = 1.0;    // Π_{j<k} (1 − p_j)
  double pair_scale = 0.5;  // 2^{-k}: pairs of generation k per source pair, halved per round
  double total = 0.0;
  for (int k = 1; k <= max_rounds; ++k) {
    const double p = success_probability(s);
    total += survival * p * pair_scale;
    report.per_round.push_back({k, s, p, total});
    survival *= 1.0 - p;
    pair_scale *= 0.5;
    if (s != 0.0 && s != 1.0) s = next_s(s);
  }
  report.total_yield = total;
  report.baseline_yield = report.per_round.front().p / 2.0;
  return report;
}

MonteCarloReport monte_carlo(double s0, std::int64_t trials, int max_rounds,
                             std::uint64_t seed) {
  if (trials < 1) {
    throw Error(ErrorCode::Domain, "trials must be at least 1");
  }
  if (!(s0 >= 0.0 && s0 <= 1.0)) {
    throw Error(ErrorCode::Domain, "s0 = " + std::to_string(s0) + " outside [0, 1]");
  }
  if (max_rounds < 1) {
    throw Error(ErrorCode::Domain, "max_rounds must be at least 1");
  }

  MonteCarloReport report{trials, seed, max_rounds,
                          std::vector<std::int64_t>(static_cast<std::size_t>(max_rounds), 0),
                          0, 0.0, 0.0};
  const PairSpec spec = PairSpec::from_s(s0);

  double sum_w = 0.0;
  double sum_w2 = 0.0;
  for (std::int64_t i = 0; i < trials; ++i) {
    RandomSource rng = RandomSource::for_stream(seed, static_cast<std::uint64_t>(i));
    const auto records = run_trajectory(spec, max_rounds, rng);
    const TrajectoryRecord& last = records.back();
    if (last.outcome.tag == RoundOutcome::Tag::Success) {
      report.success_counts_per_round[static_cast<std::size_t>(last.round_index - 1)]++;
      const double w = std::ldexp(1.0, -last.round_index);
      sum_w += w;
      sum_w2 += w * w;
    } else {
      report.unresolved++;
    }
  }

  const double n = static_cast<double>(trials);
  report.estimated_yield = sum_w / n;
  report.standard_error =
      std::sqrt(std::max(0.0, (sum_w2 / n - report.estimated_yield * report.estimated_yield) / n));
  return report;
}

}  // namespace spinconc
