#include "spinconc/statevec.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <utility>

namespace spinconc {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Normalization: return "normalization";
    case ErrorCode::Label: return "label";
    case ErrorCode::Identity: return "identity";
    case ErrorCode::Projection: return "projection";
    case ErrorCode::Exclusion: return "exclusion";
    case ErrorCode::Domain: return "domain";
    case ErrorCode::ProtocolState: return "protocol-state";
    case ErrorCode::Io: return "io";
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::Internal: return "internal";
  }
  return "unknown";
}

const char* to_string(Spin s) { return s == Spin::Up ? "up" : "down"; }

const char* to_string(ChargeOutcome outcome) {
  return outcome == ChargeOutcome::One ? "one" : "not-one";
}

// ---------------------------------------------------------------------------
// BasisConfig

BasisConfig::BasisConfig(std::vector<Entry> entries) : entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end(),
            [](const Entry& a, const Entry& b) { return a.electron < b.electron; });
  for (std::size_t i = 1; i < entries_.size(); ++i) {
    if (entries_[i].electron == entries_[i - 1].electron) {
      throw Error(ErrorCode::Identity,
                  "duplicate electron id " + std::to_string(entries_[i].electron) +
                      " in basis configuration");
    }
  }
}

bool BasisConfig::contains(ElectronId electron) const {
  for (const Entry& e : entries_) {
    if (e.electron == electron) return true;
  }
  return false;
}

const Slot& BasisConfig::slot_of(ElectronId electron) const {
  for (const Entry& e : entries_) {
    if (e.electron == electron) return e.slot;
  }
  throw Error(ErrorCode::Identity,
              "unknown electron id " + std::to_string(electron));
}

BasisConfig BasisConfig::with_slot(ElectronId electron, Slot slot) const {
  BasisConfig out(*this);
  for (Entry& e : out.entries_) {
    if (e.electron == electron) {
      e.slot = std::move(slot);
      return out;
    }
  }
  throw Error(ErrorCode::Identity,
              "unknown electron id " + std::to_string(electron));
}

BasisConfig BasisConfig::without(ElectronId electron) const {
  BasisConfig out;
  out.entries_.reserve(entries_.size());
  bool found = false;
  for (const Entry& e : entries_) {
    if (e.electron == electron) {
      found = true;
    } else {
      out.entries_.push_back(e);
    }
  }
  if (!found) {
    throw Error(ErrorCode::Identity,
                "unknown electron id " + std::to_string(electron));
  }
  return out;
}

int BasisConfig::occupancy(const ModeLabel& mode) const {
  int n = 0;
  for (const Entry& e : entries_) {
    if (e.slot.mode == mode) ++n;
  }
  return n;
}

// ---------------------------------------------------------------------------
// PureState

namespace {

bool config_less(const PureState::Term& a, const PureState::Term& b) {
  return a.config < b.config;
}

void check_pauli(const BasisConfig& config) {
  const auto& entries = config.entries();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    for (std::size_t j = i + 1; j < entries.size(); ++j) {
      if (entries[i].slot == entries[j].slot) {
        throw Error(ErrorCode::Exclusion,
                    "electrons " + std::to_string(entries[i].electron) + " and " +
                        std::to_string(entries[j].electron) +
                        " share slot (" + entries[i].slot.mode.name + ", " +
                        to_string(entries[i].slot.spin) + ")");
      }
    }
  }
}

}  // namespace

PureState PureState::from_terms(std::vector<Term> terms, bool expect_normalized) {
  if (terms.empty()) {
    throw Error(ErrorCode::Normalization, "state must have at least one term");
  }
  std::sort(terms.begin(), terms.end(), config_less);

  PureState out;
  out.terms_.reserve(terms.size());
  for (Term& t : terms) {
    if (!out.terms_.empty() && out.terms_.back().config == t.config) {
      out.terms_.back().amplitude += t.amplitude;
    } else {
      out.terms_.push_back(std::move(t));
    }
  }
  std::erase_if(out.terms_, [](const Term& t) {
    return std::norm(t.amplitude) < kPruneThreshold;
  });
  if (out.terms_.empty()) {
    throw Error(ErrorCode::Normalization, "all amplitudes vanish");
  }

  for (const auto& e : out.terms_.front().config.entries()) {
    out.electrons_.push_back(e.electron);
  }

  std::map<std::string, Party> owners;
  for (const Term& t : out.terms_) {
    if (!std::isfinite(t.amplitude.real()) || !std::isfinite(t.amplitude.imag())) {
      throw Error(ErrorCode::Internal, "non-finite amplitude");
    }
    const auto& entries = t.config.entries();
    if (entries.size() != out.electrons_.size()) {
      throw Error(ErrorCode::Identity, "terms track different electron sets");
    }
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (entries[i].electron != out.electrons_[i]) {
        throw Error(ErrorCode::Identity, "terms track different electron sets");
      }
      auto [it, inserted] = owners.emplace(entries[i].slot.mode.name, entries[i].slot.mode.side);
      if (!inserted && it->second != entries[i].slot.mode.side) {
        throw Error(ErrorCode::Label,
                    "mode " + entries[i].slot.mode.name + " claimed by two parties");
      }
    }
    check_pauli(t.config);
  }

  if (expect_normalized) {
    const double n2 = out.norm_squared();
    if (std::abs(n2 - 1.0) > kNormTolerance) {
      throw Error(ErrorCode::Normalization,
                  "state norm^2 = " + std::to_string(n2) + " is not 1");
    }
  }
  return out;
}

bool PureState::has_electron(ElectronId electron) const {
  return std::binary_search(electrons_.begin(), electrons_.end(), electron);
}

bool PureState::has_mode(const ModeLabel& mode) const {
  for (const Term& t : terms_) {
    if (t.config.occupancy(mode) > 0) return true;
  }
  return false;
}

double PureState::norm_squared() const {
  double n2 = 0.0;
  for (const Term& t : terms_) n2 += std::norm(t.amplitude);
  return n2;
}

// ---------------------------------------------------------------------------
// PbsSpec

PbsSpec PbsSpec::make(const ModeLabel& in1, const ModeLabel& in2,
                      const ModeLabel& in1_up_out, const ModeLabel& in1_down_out,
                      const ModeLabel& in2_up_out, const ModeLabel& in2_down_out) {
  if (in1 == in2) {
    throw Error(ErrorCode::Label, "PBS input modes must be distinct");
  }
  if (in1_up_out == in2_up_out || in1_down_out == in2_down_out) {
    throw Error(ErrorCode::Label,
                "PBS must route equal spins from the two inputs to different outputs");
  }
  std::set<ModeLabel> outs{in1_up_out, in1_down_out, in2_up_out, in2_down_out};
  if (outs.size() != 2) {
    throw Error(ErrorCode::Label, "PBS must have exactly two output modes");
  }
  for (const ModeLabel& out : outs) {
    if (out == in1 || out == in2) {
      throw Error(ErrorCode::Label, "PBS output modes must differ from inputs");
    }
  }

  PbsSpec pbs;
  pbs.inputs_ = {in1, in2};
  pbs.outputs_.assign(outs.begin(), outs.end());
  pbs.routed_ = {in1_up_out, in1_down_out, in2_up_out, in2_down_out};
  return pbs;
}

const ModeLabel& PbsSpec::route(const ModeLabel& input, Spin spin) const {
  const int spin_off = spin == Spin::Up ? 0 : 1;
  if (input == inputs_[0]) return routed_[spin_off];
  if (input == inputs_[1]) return routed_[2 + spin_off];
  throw Error(ErrorCode::Label, "mode " + input.name + " is not a PBS input");
}

bool PbsSpec::is_input(const ModeLabel& mode) const {
  return mode == inputs_[0] || mode == inputs_[1];
}

bool PbsSpec::is_output(const ModeLabel& mode) const {
  return mode == outputs_[0] || mode == outputs_[1];
}

// ---------------------------------------------------------------------------
// Sources and gates

PureState make_pair(const Amplitude& alpha, const Amplitude& beta,
                    const ModeLabel& first_mode, const ModeLabel& second_mode,
                    ElectronId first_electron) {
  if (first_mode == second_mode) {
    throw Error(ErrorCode::Label, "pair modes must be distinct");
  }
  const double n2 = std::norm(alpha) + std::norm(beta);
  if (!std::isfinite(n2) || std::abs(n2 - 1.0) > kNormTolerance) {
    throw Error(ErrorCode::Normalization,
                "|alpha|^2 + |beta|^2 = " + std::to_string(n2) + " is not 1");
  }

  const ElectronId e1 = first_electron;
  const ElectronId e2 = first_electron + 1;
  std::vector<PureState::Term> terms;
  for (const auto& [amp, spin] : {std::pair{alpha, Spin::Up}, std::pair{beta, Spin::Down}}) {
    if (std::norm(amp) < kPruneThreshold) continue;
    terms.push_back({BasisConfig({{e1, {first_mode, spin}}, {e2, {second_mode, spin}}}), amp});
  }
  return PureState::from_terms(std::move(terms));
}

PureState tensor(const PureState& s1, const PureState& s2) {
  for (const ElectronId id : s2.electrons()) {
    if (s1.has_electron(id)) {
      throw Error(ErrorCode::Label,
                  "tensor factors share electron id " + std::to_string(id));
    }
  }
  std::set<std::string> modes1;
  for (const auto& e : s1.terms().front().config.entries()) modes1.insert(e.slot.mode.name);
  for (const PureState::Term& t : s1.terms()) {
    for (const auto& e : t.config.entries()) modes1.insert(e.slot.mode.name);
  }
  for (const PureState::Term& t : s2.terms()) {
    for (const auto& e : t.config.entries()) {
      if (modes1.count(e.slot.mode.name) != 0) {
        throw Error(ErrorCode::Label, "tensor factors share mode " + e.slot.mode.name);
      }
    }
  }

  std::vector<PureState::Term> terms;
  terms.reserve(s1.terms().size() * s2.terms().size());
  for (const PureState::Term& t1 : s1.terms()) {
    for (const PureState::Term& t2 : s2.terms()) {
      std::vector<BasisConfig::Entry> entries = t1.config.entries();
      entries.insert(entries.end(), t2.config.entries().begin(), t2.config.entries().end());
      terms.push_back({BasisConfig(std::move(entries)), t1.amplitude * t2.amplitude});
    }
  }
  return PureState::from_terms(std::move(terms));
}

namespace {

void require_electron(const PureState& state, ElectronId electron) {
  if (!state.has_electron(electron)) {
    throw Error(ErrorCode::Identity,
                "state does not track electron " + std::to_string(electron));
  }
}

}  // namespace

PureState rotate90(const PureState& state, ElectronId electron) {
  require_electron(state, electron);
  std::vector<PureState::Term> terms;
  terms.reserve(state.terms().size());
  for (const PureState::Term& t : state.terms()) {
    const Slot& s = t.config.slot_of(electron);
    terms.push_back({t.config.with_slot(electron, {s.mode, flipped(s.spin)}), t.amplitude});
  }
  return PureState::from_terms(std::move(terms));
}

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// H|↑⟩ = (|↑⟩+|↓⟩)/√2, H|↓⟩ = (|↑⟩−|↓⟩)/√2.
void hadamard_split(const PureState::Term& t, ElectronId electron,
                    std::vector<PureState::Term>& out) {
  const Slot& s = t.config.slot_of(electron);
  const Amplitude half = t.amplitude * kInvSqrt2;
  out.push_back({t.config.with_slot(electron, {s.mode, Spin::Up}), half});
  out.push_back({t.config.with_slot(electron, {s.mode, Spin::Down}),
                 s.spin == Spin::Down ? -half : half});
}

ElectronId sole_occupant(const BasisConfig& config, const ModeLabel& mode) {
  ElectronId found = -1;
  int count = 0;
  for (const auto& e : config.entries()) {
    if (e.slot.mode == mode) {
      found = e.electron;
      ++count;
    }
  }
  if (count != 1) {
    throw Error(ErrorCode::ProtocolState,
                "mode " + mode.name + " holds " + std::to_string(count) +
                    " electrons where exactly one is required");
  }
  return found;
}

void require_mode(const PureState& state, const ModeLabel& mode) {
  if (!state.has_mode(mode)) {
    throw Error(ErrorCode::Label, "state has no electron in mode " + mode.name);
  }
}

}  // namespace

PureState hadamard(const PureState& state, ElectronId electron) {
  require_electron(state, electron);
  std::vector<PureState::Term> terms;
  terms.reserve(2 * state.terms().size());
  for (const PureState::Term& t : state.terms()) {
    hadamard_split(t, electron, terms);
  }
  return PureState::from_terms(std::move(terms));
}

PureState hadamard_mode(const PureState& state, const ModeLabel& mode) {
  require_mode(state, mode);
  std::vector<PureState::Term> terms;
  terms.reserve(2 * state.terms().size());
  for (const PureState::Term& t : state.terms()) {
    hadamard_split(t, sole_occupant(t.config, mode), terms);
  }
  return PureState::from_terms(std::move(terms));
}

PureState phase_flip(const PureState& state, ElectronId electron) {
  require_electron(state, electron);
  std::vector<PureState::Term> terms;
  terms.reserve(state.terms().size());
  for (const PureState::Term& t : state.terms()) {
    const bool down = t.config.slot_of(electron).spin == Spin::Down;
    terms.push_back({t.config, down ? -t.amplitude : t.amplitude});
  }
  return PureState::from_terms(std::move(terms));
}

PureState apply_pbs(const PureState& state, const PbsSpec& pbs) {
  std::vector<PureState::Term> terms;
  terms.reserve(state.terms().size());
  for (const PureState::Term& t : state.terms()) {
    std::vector<BasisConfig::Entry> entries = t.config.entries();
    for (auto& e : entries) {
      if (pbs.is_output(e.slot.mode)) {
        throw Error(ErrorCode::Label,
                    "PBS output mode " + e.slot.mode.name + " is already occupied");
      }
      if (pbs.is_input(e.slot.mode)) {
        e.slot.mode = pbs.route(e.slot.mode, e.slot.spin);
      }
    }
    terms.push_back({BasisConfig(std::move(entries)), t.amplitude});
  }
  // from_terms re-checks Pauli exclusion; a violation here is a hard fault.
  return PureState::from_terms(std::move(terms));
}

// ---------------------------------------------------------------------------
// Measurements

namespace {

PureState project(double probability, const std::vector<const PureState::Term*>& kept) {
  const double scale = 1.0 / std::sqrt(probability);
  std::vector<PureState::Term> terms;
  terms.reserve(kept.size());
  for (const PureState::Term* t : kept) {
    terms.push_back({t->config, t->amplitude * scale});
  }
  return PureState::from_terms(std::move(terms));
}

Projection charge_branch(const PureState& state, const ModeLabel& mode, ChargeOutcome branch) {
  double probability = 0.0;
  std::vector<const PureState::Term*> kept;
  for (const PureState::Term& t : state.terms()) {
    const bool one = t.config.occupancy(mode) == 1;
    if (one == (branch == ChargeOutcome::One)) {
      probability += std::norm(t.amplitude);
      kept.push_back(&t);
    }
  }
  if (probability < kPruneThreshold) {
    throw Error(ErrorCode::Projection,
                std::string("charge branch ") + to_string(branch) + " on mode " +
                    mode.name + " has zero weight");
  }
  return {probability, project(probability, kept)};
}

// Removes the occupant of `mode` in every kept term. When the occupant id
// differs between terms, survivors are re-keyed to the first term's mode→id
// assignment (requires exactly one survivor per mode in every term).
PureState drop_mode_occupant(const std::vector<const PureState::Term*>& kept,
                             const ModeLabel& mode, double probability) {
  const double scale = 1.0 / std::sqrt(probability);
  std::vector<BasisConfig> configs;
  configs.reserve(kept.size());
  bool uniform_ids = true;
  for (const PureState::Term* t : kept) {
    configs.push_back(t->config.without(sole_occupant(t->config, mode)));
    if (configs.back().entries().size() != configs.front().entries().size()) {
      uniform_ids = false;
    } else {
      for (std::size_t i = 0; i < configs.back().entries().size(); ++i) {
        if (configs.back().entries()[i].electron != configs.front().entries()[i].electron) {
          uniform_ids = false;
        }
      }
    }
  }

  std::vector<PureState::Term> terms;
  terms.reserve(kept.size());
  if (uniform_ids) {
    for (std::size_t i = 0; i < kept.size(); ++i) {
      terms.push_back({std::move(configs[i]), kept[i]->amplitude * scale});
    }
    return PureState::from_terms(std::move(terms));
  }

  std::map<ModeLabel, ElectronId> canonical;
  for (const auto& e : configs.front().entries()) {
    if (!canonical.emplace(e.slot.mode, e.electron).second) {
      throw Error(ErrorCode::ProtocolState,
                  "cannot re-key survivors: mode " + e.slot.mode.name +
                      " holds more than one electron");
    }
  }
  for (std::size_t i = 0; i < configs.size(); ++i) {
    std::vector<BasisConfig::Entry> entries;
    entries.reserve(configs[i].entries().size());
    for (const auto& e : configs[i].entries()) {
      const auto it = canonical.find(e.slot.mode);
      if (it == canonical.end()) {
        throw Error(ErrorCode::ProtocolState,
                    "cannot re-key survivors: terms occupy different mode sets");
      }
      entries.push_back({it->second, e.slot});
    }
    if (entries.size() != canonical.size()) {
      throw Error(ErrorCode::ProtocolState,
                  "cannot re-key survivors: terms occupy different mode sets");
    }
    terms.push_back({BasisConfig(std::move(entries)), kept[i]->amplitude * scale});
  }
  return PureState::from_terms(std::move(terms));
}

Projection spin_branch(const PureState& state, ElectronId electron, Spin branch) {
  double probability = 0.0;
  std::vector<const PureState::Term*> kept;
  for (const PureState::Term& t : state.terms()) {
    if (t.config.slot_of(electron).spin == branch) {
      probability += std::norm(t.amplitude);
      kept.push_back(&t);
    }
  }
  if (probability < kPruneThreshold) {
    throw Error(ErrorCode::Projection,
                std::string("spin branch ") + to_string(branch) + " of electron " +
                    std::to_string(electron) + " has zero weight");
  }
  const double scale = 1.0 / std::sqrt(probability);
  std::vector<PureState::Term> terms;
  terms.reserve(kept.size());
  for (const PureState::Term* t : kept) {
    terms.push_back({t->config.without(electron), t->amplitude * scale});
  }
  return {probability, PureState::from_terms(std::move(terms))};
}

Projection mode_spin_branch(const PureState& state, const ModeLabel& mode, Spin branch) {
  double probability = 0.0;
  std::vector<const PureState::Term*> kept;
  for (const PureState::Term& t : state.terms()) {
    if (t.config.slot_of(sole_occupant(t.config, mode)).spin == branch) {
      probability += std::norm(t.amplitude);
      kept.push_back(&t);
    }
  }
  if (probability < kPruneThreshold) {
    throw Error(ErrorCode::Projection,
                std::string("spin branch ") + to_string(branch) + " in mode " +
                    mode.name + " has zero weight");
  }
  return {probability, drop_mode_occupant(kept, mode, probability)};
}

}  // namespace

// A mode no term occupies is a legal detector path: it reads NotOne with
// certainty, so only a forced One branch can fail (Projection error).
ChargeDetection charge_detect(const PureState& state, const ModeLabel& mode,
                              RandomSource& rng) {
  double p_one = 0.0;
  for (const PureState::Term& t : state.terms()) {
    if (t.config.occupancy(mode) == 1) p_one += std::norm(t.amplitude);
  }
  const ChargeOutcome outcome =
      rng.next_unit() < p_one ? ChargeOutcome::One : ChargeOutcome::NotOne;
  Projection branch = charge_branch(state, mode, outcome);
  return {outcome, branch.probability, std::move(branch.post)};
}

Projection charge_detect_branch(const PureState& state, const ModeLabel& mode,
                                ChargeOutcome forced) {
  return charge_branch(state, mode, forced);
}

SpinMeasurement measure_z(const PureState& state, ElectronId electron,
                          RandomSource& rng) {
  require_electron(state, electron);
  double p_up = 0.0;
  for (const PureState::Term& t : state.terms()) {
    if (t.config.slot_of(electron).spin == Spin::Up) p_up += std::norm(t.amplitude);
  }
  const Spin outcome = rng.next_unit() < p_up ? Spin::Up : Spin::Down;
  Projection branch = spin_branch(state, electron, outcome);
  return {outcome, branch.probability, std::move(branch.post)};
}

Projection measure_z_branch(const PureState& state, ElectronId electron, Spin forced) {
  require_electron(state, electron);
  return spin_branch(state, electron, forced);
}

SpinMeasurement measure_mode_z(const PureState& state, const ModeLabel& mode,
                               RandomSource& rng) {
  require_mode(state, mode);
  double p_up = 0.0;
  for (const PureState::Term& t : state.terms()) {
    if (t.config.slot_of(sole_occupant(t.config, mode)).spin == Spin::Up) {
      p_up += std::norm(t.amplitude);
    }
  }
  const Spin outcome = rng.next_unit() < p_up ? Spin::Up : Spin::Down;
  Projection branch = mode_spin_branch(state, mode, outcome);
  return {outcome, branch.probability, std::move(branch.post)};
}

Projection measure_mode_z_branch(const PureState& state, const ModeLabel& mode,
                                 Spin forced) {
  require_mode(state, mode);
  return mode_spin_branch(state, mode, forced);
}

double fidelity(const PureState& s1, const PureState& s2) {
  if (!std::ranges::equal(s1.electrons(), s2.electrons())) {
    throw Error(ErrorCode::Identity, "fidelity requires matching electron sets");
  }
  Amplitude overlap{0.0, 0.0};
  auto it1 = s1.terms().begin();
  auto it2 = s2.terms().begin();
  while (it1 != s1.terms().end() && it2 != s2.terms().end()) {
    if (it1->config < it2->config) {
      ++it1;
    } else if (it2->config < it1->config) {
      ++it2;
    } else {
      overlap += std::conj(it1->amplitude) * it2->amplitude;
      ++it1;
      ++it2;
    }
  }
  return std::norm(overlap);
}

}  // namespace spinconc
