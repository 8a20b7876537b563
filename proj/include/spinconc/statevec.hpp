#pragma once

#include <compare>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spinconc/error.hpp"
#include "spinconc/random.hpp"

namespace spinconc {

using Amplitude = std::complex<double>;

/// States are accepted as normalized when Σ|amplitude|² is within this of 1.
inline constexpr double kNormTolerance = 1e-12;

/// Terms with |amplitude|² below this are dropped when states are built.
inline constexpr double kPruneThreshold = 1e-30;

enum class Spin : std::uint8_t { Up, Down };

constexpr Spin flipped(Spin s) { return s == Spin::Up ? Spin::Down : Spin::Up; }

const char* to_string(Spin s);

/// Owner of a spatial mode.
struct Party {
  enum class Kind : std::uint8_t { Alice, Bob, Other };

  Kind kind{Kind::Alice};
  std::int32_t index{0};  // party number, used for Kind::Other only

  static constexpr Party alice() { return {Kind::Alice, 0}; }
  static constexpr Party bob() { return {Kind::Bob, 0}; }
  static constexpr Party other(std::int32_t index) { return {Kind::Other, index}; }

  friend constexpr auto operator<=>(const Party&, const Party&) = default;
};

/// A named spatial mode. Within one state a name belongs to exactly one party.
struct ModeLabel {
  std::string name;
  Party side;

  friend auto operator<=>(const ModeLabel&, const ModeLabel&) = default;
};

/// Stable electron identity, assigned at source creation and preserved by
/// every gate and routing.
using ElectronId = std::int32_t;

/// A (mode, spin) slot occupied by one electron. Pauli exclusion: no two
/// electrons of a basis configuration may share a slot.
struct Slot {
  ModeLabel mode;
  Spin spin{Spin::Up};

  friend auto operator<=>(const Slot&, const Slot&) = default;
};

/// Assignment of every tracked electron to a slot; one basis ket.
class BasisConfig {
 public:
  struct Entry {
    ElectronId electron{0};
    Slot slot;

    friend auto operator<=>(const Entry&, const Entry&) = default;
  };

  BasisConfig() = default;
  explicit BasisConfig(std::vector<Entry> entries);

  const std::vector<Entry>& entries() const { return entries_; }
  bool contains(ElectronId electron) const;
  const Slot& slot_of(ElectronId electron) const;
  BasisConfig with_slot(ElectronId electron, Slot slot) const;
  BasisConfig without(ElectronId electron) const;

  /// Number of electrons currently in `mode`.
  int occupancy(const ModeLabel& mode) const;

  friend auto operator<=>(const BasisConfig&, const BasisConfig&) = default;

 private:
  std::vector<Entry> entries_;  // sorted by electron id
};

/// Exact pure state: a superposition of basis configurations over one fixed
/// electron set. Immutable after construction; operations return new states.
class PureState {
 public:
  struct Term {
    BasisConfig config;
    Amplitude amplitude;
  };

  /// Canonicalizes (sorts by configuration, merges duplicates, prunes terms
  /// below kPruneThreshold) and validates: common electron set across terms,
  /// consistent mode ownership, Pauli exclusion, finite amplitudes, and —
  /// when `expect_normalized` — unit norm within kNormTolerance.
  static PureState from_terms(std::vector<Term> terms, bool expect_normalized = true);

  const std::vector<Term>& terms() const { return terms_; }
  std::span<const ElectronId> electrons() const { return electrons_; }
  bool has_electron(ElectronId electron) const;
  bool has_mode(const ModeLabel& mode) const;
  double norm_squared() const;

 private:
  PureState() = default;

  std::vector<Term> terms_;           // sorted by configuration
  std::vector<ElectronId> electrons_; // sorted
};

/// Two-port polarizing beam splitter: routes by (input mode, spin), never
/// flips spins. Same-spin entries from the two inputs go to different
/// outputs, so a two-electron input can never stack equal spins in one mode.
class PbsSpec {
 public:
  static PbsSpec make(const ModeLabel& in1, const ModeLabel& in2,
                      const ModeLabel& in1_up_out, const ModeLabel& in1_down_out,
                      const ModeLabel& in2_up_out, const ModeLabel& in2_down_out);

  const ModeLabel& route(const ModeLabel& input, Spin spin) const;
  bool is_input(const ModeLabel& mode) const;
  bool is_output(const ModeLabel& mode) const;
  std::span<const ModeLabel> inputs() const { return inputs_; }
  std::span<const ModeLabel> outputs() const { return outputs_; }

 private:
  PbsSpec() = default;

  std::vector<ModeLabel> inputs_;   // in1, in2
  std::vector<ModeLabel> outputs_;  // the two distinct output labels
  std::vector<ModeLabel> routed_;   // [in1 up, in1 down, in2 up, in2 down]
};

/// α|↑↑⟩ + β|↓↓⟩ on two distinct modes, electrons `first_electron` and
/// `first_electron + 1`. Coefficients must satisfy |α|² + |β|² = 1.
PureState make_pair(const Amplitude& alpha, const Amplitude& beta,
                    const ModeLabel& first_mode, const ModeLabel& second_mode,
                    ElectronId first_electron = 0);

/// Product state of two states with disjoint electrons and disjoint modes.
PureState tensor(const PureState& s1, const PureState& s2);

/// Half-wave rotation: exchanges |↑⟩ and |↓⟩ of one electron.
PureState rotate90(const PureState& state, ElectronId electron);

/// |↑⟩→(|↑⟩+|↓⟩)/√2, |↓⟩→(|↑⟩−|↓⟩)/√2 on one electron.
PureState hadamard(const PureState& state, ElectronId electron);

/// Hadamard on whichever electron occupies `mode` in each term. Every term
/// must have exactly one electron in that mode.
PureState hadamard_mode(const PureState& state, const ModeLabel& mode);

/// Terms where the electron is spin-down acquire a factor −1.
PureState phase_flip(const PureState& state, ElectronId electron);

/// Rewrites the mode of every electron sitting in the PBS inputs according
/// to the routing table. Output modes must start empty; the result is
/// checked for Pauli exclusion (a violation is a hard fault).
PureState apply_pbs(const PureState& state, const PbsSpec& pbs);

enum class ChargeOutcome : std::uint8_t { One, NotOne };

const char* to_string(ChargeOutcome outcome);

struct ChargeDetection {
  ChargeOutcome outcome;
  double probability;  // Born probability of `outcome`
  PureState post;      // normalized projection
};

/// Nondestructive occupation-parity measurement: distinguishes "exactly one
/// electron in `mode`" from "zero or two", sampling via the Born rule. Spins
/// are untouched. A mode no term occupies reads NotOne with certainty.
ChargeDetection charge_detect(const PureState& state, const ModeLabel& mode,
                              RandomSource& rng);

struct Projection {
  double probability;
  PureState post;
};

/// Deterministic branch of charge_detect; Projection error if the forced
/// branch has weight below kPruneThreshold.
Projection charge_detect_branch(const PureState& state, const ModeLabel& mode,
                                ChargeOutcome forced);

struct SpinMeasurement {
  Spin outcome;
  double probability;
  PureState post;  // measured electron removed from the tracked set
};

/// Destructive Z-basis measurement of one electron.
SpinMeasurement measure_z(const PureState& state, ElectronId electron,
                          RandomSource& rng);
Projection measure_z_branch(const PureState& state, ElectronId electron, Spin forced);

/// Destructive Z-basis measurement of the electron occupying `mode` (a
/// detector placed in that spatial path). Every term must hold exactly one
/// electron there. If the occupant's identity differs between terms, the
/// surviving electrons are re-keyed to the first term's mode→id assignment,
/// which requires one survivor per mode.
SpinMeasurement measure_mode_z(const PureState& state, const ModeLabel& mode,
                               RandomSource& rng);
Projection measure_mode_z_branch(const PureState& state, const ModeLabel& mode,
                                 Spin forced);

/// |⟨s1|s2⟩|² over matching basis configurations; the states must track the
/// same electron set.
double fidelity(const PureState& s1, const PureState& s2);

}  // namespace spinconc
