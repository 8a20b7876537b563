#include "spinconc/protocol.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace spinconc {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

constexpr ElectronId kAlice1 = 0;  // a1, kept on success
constexpr ElectronId kBob1 = 1;    // b1
constexpr ElectronId kAlice2 = 2;  // a3, measured
constexpr ElectronId kBob2 = 3;    // b3
constexpr ElectronId kFirstRegister = 4;

void check_coefficients(const Amplitude& alpha, const Amplitude& beta) {
  const double n2 = std::norm(alpha) + std::norm(beta);
  if (!std::isfinite(n2) || std::abs(n2 - 1.0) > kNormTolerance) {
    throw Error(ErrorCode::Normalization,
                "|alpha|^2 + |beta|^2 = " + std::to_string(n2) + " is not 1");
  }
}

}  // namespace

PairSpec::PairSpec(Amplitude alpha, Amplitude beta)
    : alpha_(std::move(alpha)), beta_(std::move(beta)) {
  check_coefficients(alpha_, beta_);
}

PairSpec PairSpec::from_s(double s) {
  if (!(s >= 0.0 && s <= 1.0)) {
    throw Error(ErrorCode::Domain, "s = " + std::to_string(s) + " outside [0, 1]");
  }
  return PairSpec(std::sqrt(s), std::sqrt(1.0 - s));
}

double PairSpec::s() const { return std::norm(alpha_); }

GhzSpec::GhzSpec(std::int32_t parties, Amplitude alpha, Amplitude beta,
                 std::vector<Spin> u_register)
    : parties_(parties),
      alpha_(std::move(alpha)),
      beta_(std::move(beta)),
      u_register_(std::move(u_register)) {
  if (parties_ < 2) {
    throw Error(ErrorCode::Domain, "a GHZ source needs at least 2 parties");
  }
  if (u_register_.size() != static_cast<std::size_t>(parties_ - 2)) {
    throw Error(ErrorCode::Domain,
                "u register must hold parties - 2 = " + std::to_string(parties_ - 2) +
                    " spins, got " + std::to_string(u_register_.size()));
  }
  check_coefficients(alpha_, beta_);
}

double GhzSpec::s() const { return std::norm(alpha_); }

const char* to_string(Correction c) {
  return c == Correction::PhaseFlip ? "phase_flip" : "none";
}

namespace modes {

ModeLabel a1() { return {"a1", Party::alice()}; }
ModeLabel a3() { return {"a3", Party::alice()}; }
ModeLabel b1() { return {"b1", Party::bob()}; }
ModeLabel b3() { return {"b3", Party::bob()}; }
ModeLabel c1() { return {"c1", Party::bob()}; }
ModeLabel c2() { return {"c2", Party::bob()}; }
ModeLabel c3() { return {"c3", Party::bob()}; }
ModeLabel c4() { return {"c4", Party::bob()}; }

ModeLabel reg_keep(std::int32_t party) {
  return {"u" + std::to_string(party), Party::other(party)};
}

ModeLabel reg_measure(std::int32_t party) {
  return {"w" + std::to_string(party), Party::other(party)};
}

}  // namespace modes

namespace {

// Parity-check routing: from b1, up -> c2 and down -> c1; from b3, up -> c1
// and down -> c2. Even-parity spins land one per output, odd-parity co-locate.
PbsSpec parity_pbs() {
  return PbsSpec::make(modes::b1(), modes::b3(),
                       /*in1 up*/ modes::c2(), /*in1 down*/ modes::c1(),
                       /*in2 up*/ modes::c1(), /*in2 down*/ modes::c2());
}

// α|u⟩|↑↑⟩ + β|ū⟩|↓↓⟩ over one Alice electron, one Bob electron and the
// n−2 register electrons.
PureState ghz_source(const Amplitude& alpha, const Amplitude& beta,
                     std::span<const Spin> u_register, const ModeLabel& a_mode,
                     const ModeLabel& b_mode, std::span<const ModeLabel> register_modes,
                     ElectronId a_id, ElectronId b_id, ElectronId first_register_id) {
  std::vector<PureState::Term> terms;
  for (const auto& [amp, base] :
       {std::pair{alpha, Spin::Up}, std::pair{beta, Spin::Down}}) {
    if (std::norm(amp) < kPruneThreshold) continue;
    std::vector<BasisConfig::Entry> entries;
    entries.reserve(2 + register_modes.size());
    entries.push_back({a_id, {a_mode, base}});
    entries.push_back({b_id, {b_mode, base}});
    for (std::size_t i = 0; i < register_modes.size(); ++i) {
      const Spin spin = base == Spin::Up ? u_register[i] : flipped(u_register[i]);
      entries.push_back({static_cast<ElectronId>(first_register_id + static_cast<ElectronId>(i)),
                         {register_modes[i], spin}});
    }
    terms.push_back({BasisConfig(std::move(entries)), amp});
  }
  return PureState::from_terms(std::move(terms));
}

// Supplies measurement results: Born-rule draws or a forced pattern.
struct RoundDriver {
  virtual ~RoundDriver() = default;
  virtual ChargeDetection charge(const PureState& state, const ModeLabel& mode) = 0;
  virtual SpinMeasurement z_mode(const PureState& state, const ModeLabel& mode) = 0;
};

struct SampledDriver final : RoundDriver {
  RandomSource& rng;

  explicit SampledDriver(RandomSource& r) : rng(r) {}

  ChargeDetection charge(const PureState& state, const ModeLabel& mode) override {
    return charge_detect(state, mode, rng);
  }
  SpinMeasurement z_mode(const PureState& state, const ModeLabel& mode) override {
    return measure_mode_z(state, mode, rng);
  }
};

struct ForcedDriver final : RoundDriver {
  ChargeOutcome charge_outcome;
  std::span<const Spin> outcomes;
  std::size_t used = 0;

  ForcedDriver(ChargeOutcome c, std::span<const Spin> o) : charge_outcome(c), outcomes(o) {}

  ChargeDetection charge(const PureState& state, const ModeLabel& mode) override {
    Projection branch = charge_detect_branch(state, mode, charge_outcome);
    return {charge_outcome, branch.probability, std::move(branch.post)};
  }
  SpinMeasurement z_mode(const PureState& state, const ModeLabel& mode) override {
    if (used == outcomes.size()) {
      throw Error(ErrorCode::InvalidArgument, "forced detector outcome list too short");
    }
    const Spin forced = outcomes[used++];
    Projection branch = measure_mode_z_branch(state, mode, forced);
    return {forced, branch.probability, std::move(branch.post)};
  }
};

ElectronId alice_survivor(const PureState& state) {
  ElectronId found = -1;
  int count = 0;
  for (const auto& e : state.terms().front().config.entries()) {
    if (e.slot.mode.side.kind == Party::Kind::Alice) {
      found = e.electron;
      ++count;
    }
  }
  if (count != 1) {
    throw Error(ErrorCode::ProtocolState,
                "expected exactly one Alice-side electron, found " + std::to_string(count));
  }
  return found;
}

// (|u⟩|↑↑⟩ + |ū⟩|↓↓⟩)/√2 on the electrons and modes of `like`.
PureState ideal_target(const PureState& like, std::span<const Spin> u_register) {
  std::vector<BasisConfig::Entry> up;
  std::vector<BasisConfig::Entry> down;
  for (const auto& e : like.terms().front().config.entries()) {
    Spin base = Spin::Up;
    if (e.slot.mode.side.kind == Party::Kind::Other) {
      const std::int32_t party = e.slot.mode.side.index;
      if (party < 1 || static_cast<std::size_t>(party) > u_register.size()) {
        throw Error(ErrorCode::Internal, "register party index out of range");
      }
      base = u_register[static_cast<std::size_t>(party - 1)];
    }
    up.push_back({e.electron, {e.slot.mode, base}});
    down.push_back({e.electron, {e.slot.mode, flipped(base)}});
  }
  return PureState::from_terms({{BasisConfig(std::move(up)), kInvSqrt2},
                                {BasisConfig(std::move(down)), kInvSqrt2}});
}

// Reads (α, β) off a two-term spin-correlated pair state, keyed by the
// Alice electron's spin, and fixes the global phase so the leading
// coefficient is real positive.
PairSpec extract_pair_spec(const PureState& state) {
  if (state.terms().size() > 2) {
    throw Error(ErrorCode::ProtocolState, "recovered state is not a source pair");
  }
  const ElectronId alice = alice_survivor(state);
  Amplitude alpha{0.0, 0.0};
  Amplitude beta{0.0, 0.0};
  bool seen_up = false;
  bool seen_down = false;
  for (const PureState::Term& t : state.terms()) {
    if (t.config.slot_of(alice).spin == Spin::Up) {
      if (seen_up) throw Error(ErrorCode::ProtocolState, "recovered state is not spin-correlated");
      alpha = t.amplitude;
      seen_up = true;
    } else {
      if (seen_down) throw Error(ErrorCode::ProtocolState, "recovered state is not spin-correlated");
      beta = t.amplitude;
      seen_down = true;
    }
  }
  const Amplitude lead = std::norm(alpha) >= kPruneThreshold ? alpha : beta;
  const Amplitude phase = lead / std::abs(lead);
  return PairSpec(alpha * std::conj(phase), beta * std::conj(phase));
}

FailureRecovery recover_impl(const PureState& failure_state, const RecoveryLayout& layout,
                             RoundDriver& driver) {
  const ModeLabel in1 = layout.pbs.inputs()[0];
  const ModeLabel in2 = layout.pbs.inputs()[1];
  for (const PureState::Term& t : failure_state.terms()) {
    const int n1 = t.config.occupancy(in1);
    const int n2 = t.config.occupancy(in2);
    if (n1 + n2 != 2 || n1 == 1) {
      throw Error(ErrorCode::ProtocolState,
                  "state is not a 0-or-2 charge branch on " + in1.name + "/" + in2.name);
    }
  }

  PureState state = apply_pbs(failure_state, layout.pbs);

  std::vector<ModeLabel> z_modes{layout.alice_measure, layout.bob_measure};
  z_modes.insert(z_modes.end(), layout.register_measures.begin(),
                 layout.register_measures.end());

  std::vector<Spin> z_results;
  Correction correction = Correction::None;
  int downs = 0;
  for (const ModeLabel& mode : z_modes) {
    state = hadamard_mode(state, mode);
    SpinMeasurement measured = driver.z_mode(state, mode);
    z_results.push_back(measured.outcome);
    if (measured.outcome == Spin::Down) ++downs;
    state = std::move(measured.post);
  }

  // Odd numbers of down results leave the '−' relative sign of the
  // recycled pair; the phase flip restores '+'.
  if (downs % 2 == 1) {
    correction = Correction::PhaseFlip;
    state = phase_flip(state, alice_survivor(state));
  }
  PairSpec spec = extract_pair_spec(state);
  return {std::move(spec), std::move(state), correction, std::move(z_results)};
}

RoundOutcome run_ghz_impl(const GhzSpec& spec, RoundDriver& driver) {
  const std::int32_t n_register = spec.parties() - 2;
  const PureState pre = build_parity_check_state(spec);
  ChargeDetection detection = driver.charge(pre, modes::c1());

  RoundOutcome out;
  out.charge = detection.outcome;
  out.branch_probability = detection.probability;
  out.correction = Correction::None;
  out.success_fidelity = 0.0;

  if (detection.outcome == ChargeOutcome::One) {
    PureState state = std::move(detection.post);
    std::vector<ModeLabel> z_modes{modes::a3(), modes::c2()};
    for (std::int32_t i = 1; i <= n_register; ++i) z_modes.push_back(modes::reg_measure(i));

    int downs = 0;
    for (const ModeLabel& mode : z_modes) {
      state = hadamard_mode(state, mode);
      SpinMeasurement measured = driver.z_mode(state, mode);
      out.z_outcomes.push_back(measured.outcome);
      if (measured.outcome == Spin::Down) ++downs;
      state = std::move(measured.post);
    }
    if (downs % 2 == 1) {
      out.correction = Correction::PhaseFlip;
      state = phase_flip(state, alice_survivor(state));
    }
    out.success_fidelity = fidelity(state, ideal_target(state, spec.u_register()));
    out.success_state = std::move(state);
    out.tag = RoundOutcome::Tag::Success;
  } else {
    RecoveryLayout layout = RecoveryLayout::standard();
    for (std::int32_t i = 1; i <= n_register; ++i) {
      layout.register_measures.push_back(modes::reg_measure(i));
    }
    FailureRecovery recovery = recover_impl(detection.post, layout, driver);
    out.z_outcomes = std::move(recovery.z_outcomes);
    out.correction = recovery.correction;
    out.failure_spec = recovery.spec;
    out.tag = RoundOutcome::Tag::Failure;
  }
  return out;
}

GhzSpec bipartite(const PairSpec& spec) {
  return GhzSpec(2, spec.alpha(), spec.beta(), {});
}

}  // namespace

PureState build_parity_check_state(const PairSpec& spec) {
  return build_parity_check_state(bipartite(spec));
}

PureState build_parity_check_state(const GhzSpec& spec) {
  const std::int32_t n_register = spec.parties() - 2;
  std::vector<ModeLabel> keep_modes;
  std::vector<ModeLabel> measure_modes;
  for (std::int32_t i = 1; i <= n_register; ++i) {
    keep_modes.push_back(modes::reg_keep(i));
    measure_modes.push_back(modes::reg_measure(i));
  }

  const PureState first = ghz_source(spec.alpha(), spec.beta(), spec.u_register(),
                                     modes::a1(), modes::b1(), keep_modes,
                                     kAlice1, kBob1, kFirstRegister);
  const PureState second = ghz_source(spec.alpha(), spec.beta(), spec.u_register(),
                                      modes::a3(), modes::b3(), measure_modes,
                                      kAlice2, kBob2,
                                      static_cast<ElectronId>(kFirstRegister + n_register));

  PureState full = tensor(first, second);
  full = rotate90(full, kAlice2);
  full = rotate90(full, kBob2);
  return apply_pbs(full, parity_pbs());
}

RoundOutcome run_round(const PairSpec& spec, RandomSource& rng) {
  SampledDriver driver(rng);
  return run_ghz_impl(bipartite(spec), driver);
}

RoundOutcome run_ghz_round(const GhzSpec& spec, RandomSource& rng) {
  SampledDriver driver(rng);
  return run_ghz_impl(spec, driver);
}

RoundOutcome run_round_forced(const PairSpec& spec, ChargeOutcome charge,
                              std::span<const Spin> z_outcomes) {
  return run_ghz_round_forced(bipartite(spec), charge, z_outcomes);
}

RoundOutcome run_ghz_round_forced(const GhzSpec& spec, ChargeOutcome charge,
                                  std::span<const Spin> z_outcomes) {
  if (z_outcomes.size() != static_cast<std::size_t>(spec.parties())) {
    throw Error(ErrorCode::InvalidArgument,
                "a " + std::to_string(spec.parties()) + "-party round takes " +
                    std::to_string(spec.parties()) + " forced detector outcomes");
  }
  ForcedDriver driver(charge, z_outcomes);
  return run_ghz_impl(spec, driver);
}

RecoveryLayout RecoveryLayout::standard() {
  return {PbsSpec::make(modes::c1(), modes::c2(),
                        /*in1 up*/ modes::c4(), /*in1 down*/ modes::c3(),
                        /*in2 up*/ modes::c3(), /*in2 down*/ modes::c4()),
          modes::a3(), modes::c4(), {}};
}

FailureRecovery recover_failure(const PureState& failure_state, RandomSource& rng,
                                const RecoveryLayout& layout) {
  SampledDriver driver(rng);
  return recover_impl(failure_state, layout, driver);
}

FailureRecovery recover_failure_forced(const PureState& failure_state,
                                       std::span<const Spin> z_outcomes,
                                       const RecoveryLayout& layout) {
  ForcedDriver driver(ChargeOutcome::NotOne, z_outcomes);
  FailureRecovery recovery = recover_impl(failure_state, layout, driver);
  if (driver.used != z_outcomes.size()) {
    throw Error(ErrorCode::InvalidArgument, "forced detector outcome list too long");
  }
  return recovery;
}

std::vector<TrajectoryRecord> run_trajectory(const PairSpec& spec, int max_rounds,
                                             RandomSource& rng) {
  if (max_rounds < 1) {
    throw Error(ErrorCode::Domain, "max_rounds must be at least 1");
  }
  std::vector<TrajectoryRecord> records;
  PairSpec current = spec;
  for (int k = 1; k <= max_rounds; ++k) {
    RoundOutcome outcome = run_round(current, rng);
    const bool success = outcome.tag == RoundOutcome::Tag::Success;
    if (!success) current = *outcome.failure_spec;
    records.push_back({k, std::move(outcome)});
    if (success) break;
  }
  return records;
}

}  // namespace spinconc
