#pragma once

#include <optional>
#include <span>
#include <vector>

#include "spinconc/statevec.hpp"

namespace spinconc {

/// Coefficients (α, β) of a less-entangled source pair α|↑↑⟩ + β|↓↓⟩.
class PairSpec {
 public:
  PairSpec(Amplitude alpha, Amplitude beta);

  /// Real coefficients (√s, √(1−s)) from s = |α|².
  static PairSpec from_s(double s);

  const Amplitude& alpha() const { return alpha_; }
  const Amplitude& beta() const { return beta_; }

  /// s = |α|²; every probability of the protocol is a function of it.
  double s() const;

 private:
  Amplitude alpha_;
  Amplitude beta_;
};

/// n-party GHZ-class source α|u⟩|↑↑⟩ + β|ū⟩|↓↓⟩; |u⟩ is a computational
/// basis state of the n−2 register electrons and |ū⟩ its componentwise flip.
class GhzSpec {
 public:
  GhzSpec(std::int32_t parties, Amplitude alpha, Amplitude beta,
          std::vector<Spin> u_register);

  std::int32_t parties() const { return parties_; }
  const Amplitude& alpha() const { return alpha_; }
  const Amplitude& beta() const { return beta_; }
  const std::vector<Spin>& u_register() const { return u_register_; }
  double s() const;

 private:
  std::int32_t parties_;
  Amplitude alpha_;
  Amplitude beta_;
  std::vector<Spin> u_register_;
};

enum class Correction : std::uint8_t { None, PhaseFlip };

const char* to_string(Correction c);

/// Result of one concentration round.
struct RoundOutcome {
  enum class Tag : std::uint8_t { Success, Failure };

  Tag tag;
  /// Probability of the branch that occurred: 2|αβ|² on success,
  /// |α|⁴ + |β|⁴ on failure.
  double branch_probability;
  Correction correction;
  ChargeOutcome charge;
  std::vector<Spin> z_outcomes;  // detector results, in measurement order

  std::optional<PureState> success_state;  // corrected maximally entangled pair
  double success_fidelity;                 // vs the ideal target; 0 on failure
  std::optional<PairSpec> failure_spec;    // recycled coefficients, '+' form
};

struct TrajectoryRecord {
  int round_index;  // 1-based
  RoundOutcome outcome;
};

/// Canonical spatial-mode labels used by the protocol pipeline.
namespace modes {
ModeLabel a1();
ModeLabel a3();
ModeLabel b1();
ModeLabel b3();
ModeLabel c1();
ModeLabel c2();
ModeLabel c3();
ModeLabel c4();
/// First-copy register mode of extra party `party` (1-based).
ModeLabel reg_keep(std::int32_t party);
/// Second-copy register mode of extra party `party` (1-based).
ModeLabel reg_measure(std::int32_t party);
}  // namespace modes

/// The four-electron (plus registers) state entering the charge detector:
/// two sources, half-wave rotation on the second copy, PBS on Bob's side.
PureState build_parity_check_state(const PairSpec& spec);
PureState build_parity_check_state(const GhzSpec& spec);

/// One full concentration round: parity check, then either the Hadamard +
/// Z-measurement success stage (with phase-flip correction) or failure
/// recovery. Measurement order: charge detector first, then the detectors
/// listed in RoundOutcome::z_outcomes.
RoundOutcome run_round(const PairSpec& spec, RandomSource& rng);
RoundOutcome run_ghz_round(const GhzSpec& spec, RandomSource& rng);

/// Deterministic variants: the charge outcome and every Z result are forced
/// (2 results for a bipartite round, parties for a GHZ round).
RoundOutcome run_round_forced(const PairSpec& spec, ChargeOutcome charge,
                              std::span<const Spin> z_outcomes);
RoundOutcome run_ghz_round_forced(const GhzSpec& spec, ChargeOutcome charge,
                                  std::span<const Spin> z_outcomes);

/// Where failure recovery finds its devices: the PBS that re-splits the
/// co-located pair, the two measured modes, and (GHZ) the second-copy
/// register modes.
struct RecoveryLayout {
  PbsSpec pbs;
  ModeLabel alice_measure;
  ModeLabel bob_measure;
  std::vector<ModeLabel> register_measures;

  /// Layout of the bipartite round: PBS c1,c2 → c3,c4; measure a3 and c4;
  /// keep a1 and c3.
  static RecoveryLayout standard();
};

struct FailureRecovery {
  PairSpec spec;      // recycled (α², β²)/√(|α|⁴+|β|⁴), '+' form
  PureState post;     // the remaining less-entangled pair
  Correction correction;
  std::vector<Spin> z_outcomes;
};

/// Turns the 0-or-2 charge branch back into a source pair: a second PBS
/// separates the co-located electrons, then Hadamard + Z measurements and
/// the phase-flip rule leave α²|↑↑⟩ + β²|↓↓⟩ (normalized).
FailureRecovery recover_failure(const PureState& failure_state, RandomSource& rng,
                                const RecoveryLayout& layout = RecoveryLayout::standard());
FailureRecovery recover_failure_forced(const PureState& failure_state,
                                       std::span<const Spin> z_outcomes,
                                       const RecoveryLayout& layout = RecoveryLayout::standard());

/// Runs rounds until the first success, feeding each failure's recycled
/// coefficients into the next round, for at most max_rounds.
std::vector<TrajectoryRecord> run_trajectory(const PairSpec& spec, int max_rounds,
                                             RandomSource& rng);

}  // namespace spinconc
