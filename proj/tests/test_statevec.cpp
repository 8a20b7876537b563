#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <functional>

#include "spinconc/statevec.hpp"
#include "support/random_states.hpp"

using namespace spinconc;
using namespace spinconc::testsupport;

namespace {

const ModeLabel kA1{"a1", Party::alice()};
const ModeLabel kA3{"a3", Party::alice()};
const ModeLabel kB1{"b1", Party::bob()};
const ModeLabel kB3{"b3", Party::bob()};
const ModeLabel kC1{"c1", Party::bob()};
const ModeLabel kC2{"c2", Party::bob()};

constexpr double kInvSqrt2 = 0.70710678118654752440;

// Parity-check routing: from b1, up -> c2, down -> c1; from b3, up -> c1, down -> c2.
PbsSpec bob_pbs() { return PbsSpec::make(kB1, kB3, kC2, kC1, kC1, kC2); }

// Two sources, half-wave rotation on the second pair, no PBS yet.
PureState rotated_four_electron_state(double alpha, double beta) {
  const PureState p1 = make_pair(alpha, beta, kA1, kB1, 0);
  const PureState p2 = make_pair(alpha, beta, kA3, kB3, 2);
  PureState full = tensor(p1, p2);
  full = rotate90(full, 2);
  return rotate90(full, 3);
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::Internal;
}

}  // namespace

TEST_CASE("make_pair symmetric case gives two equal amplitudes") {
  const PureState s = make_pair(kInvSqrt2, kInvSqrt2, kA1, kB1);
  REQUIRE(s.terms().size() == 2);
  for (const auto& t : s.terms()) {
    CHECK(t.amplitude.real() == doctest::Approx(kInvSqrt2).epsilon(1e-12));
    CHECK(t.amplitude.imag() == 0.0);
  }
  CHECK(s.norm_squared() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("make_pair degenerate (1, 0) is the single product term") {
  const PureState s = make_pair(1.0, 0.0, kA1, kB1);
  REQUIRE(s.terms().size() == 1);
  CHECK(s.terms().front().config.slot_of(0).spin == Spin::Up);
  CHECK(s.terms().front().config.slot_of(1).spin == Spin::Up);
}

TEST_CASE("make_pair (0.8, 0.6): term amplitudes and norm oracle") {
  // norm oracle: 0.8^2 + 0.6^2 = 1 exactly
  const PureState s = make_pair(0.8, 0.6, kA1, kB1);
  REQUIRE(s.terms().size() == 2);
  const Amplitude up = amplitude_of_spins(s, {{0, Spin::Up}, {1, Spin::Up}});
  const Amplitude down = amplitude_of_spins(s, {{0, Spin::Down}, {1, Spin::Down}});
  CHECK(up.real() == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(down.real() == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(s.norm_squared() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("make_pair rejects bad inputs") {
  CHECK(code_of([] { make_pair(0.9, 0.6, kA1, kB1); }) == ErrorCode::Normalization);
  CHECK(code_of([] { make_pair(0.8, 0.6, kA1, kA1); }) == ErrorCode::Label);
}

TEST_CASE("tensor of two pairs: four terms with pairwise-product coefficients") {
  const PureState p1 = make_pair(0.8, 0.6, kA1, kB1, 0);
  const PureState p2 = make_pair(0.8, 0.6, kA3, kB3, 2);
  const PureState s = tensor(p1, p2);
  REQUIRE(s.terms().size() == 4);
  // multiply out: {0.64, 0.48, 0.48, 0.36}
  CHECK(amplitude_of_spins(s, {{0, Spin::Up}, {2, Spin::Up}}).real() ==
        doctest::Approx(0.8 * 0.8).epsilon(1e-15));
  CHECK(amplitude_of_spins(s, {{0, Spin::Up}, {2, Spin::Down}}).real() ==
        doctest::Approx(0.8 * 0.6).epsilon(1e-15));
  CHECK(amplitude_of_spins(s, {{0, Spin::Down}, {2, Spin::Up}}).real() ==
        doctest::Approx(0.6 * 0.8).epsilon(1e-15));
  CHECK(amplitude_of_spins(s, {{0, Spin::Down}, {2, Spin::Down}}).real() ==
        doctest::Approx(0.6 * 0.6).epsilon(1e-15));
  CHECK(s.norm_squared() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("tensor of degenerate pairs is a single product term") {
  const PureState s = tensor(make_pair(1.0, 0.0, kA1, kB1, 0), make_pair(1.0, 0.0, kA3, kB3, 2));
  CHECK(s.terms().size() == 1);
}

TEST_CASE("tensor rejects overlapping ids and labels") {
  const PureState p1 = make_pair(0.8, 0.6, kA1, kB1, 0);
  CHECK(code_of([&] { tensor(p1, make_pair(0.8, 0.6, kA3, kB3, 1)); }) == ErrorCode::Label);
  CHECK(code_of([&] { tensor(p1, make_pair(0.8, 0.6, kA1, kB3, 2)); }) == ErrorCode::Label);
}

TEST_CASE("rotate90 flips spins, twice is the identity") {
  const PureState s = make_pair(0.8, 0.6, kA1, kB1);
  const PureState r = rotate90(s, 0);
  CHECK(amplitude_of_spins(r, {{0, Spin::Down}, {1, Spin::Up}}).real() ==
        doctest::Approx(0.8).epsilon(1e-15));
  CHECK(states_equal(rotate90(r, 0), s, 1e-15));
  CHECK(code_of([&] { rotate90(s, 7); }) == ErrorCode::Identity);
}

TEST_CASE("rotate90 on both second-pair electrons reproduces the rotated four-electron state") {
  const PureState s = rotated_four_electron_state(0.8, 0.6);
  // alpha^2 term now has the second pair pointing down, the alpha*beta terms align.
  using P = std::vector<std::pair<ElectronId, Spin>>;
  CHECK(amplitude_of_spins(s, P{{0, Spin::Up}, {1, Spin::Up}, {2, Spin::Down}, {3, Spin::Down}})
            .real() == doctest::Approx(0.64).epsilon(1e-15));
  CHECK(amplitude_of_spins(s, P{{0, Spin::Up}, {1, Spin::Up}, {2, Spin::Up}, {3, Spin::Up}})
            .real() == doctest::Approx(0.48).epsilon(1e-15));
  CHECK(amplitude_of_spins(s, P{{0, Spin::Down}, {1, Spin::Down}, {2, Spin::Down}, {3, Spin::Down}})
            .real() == doctest::Approx(0.48).epsilon(1e-15));
  CHECK(amplitude_of_spins(s, P{{0, Spin::Down}, {1, Spin::Down}, {2, Spin::Up}, {3, Spin::Up}})
            .real() == doctest::Approx(0.36).epsilon(1e-15));
}

TEST_CASE("hadamard maps up to the even superposition and squares to identity") {
  const PureState up = make_pair(1.0, 0.0, kA1, kB1);
  const PureState h = hadamard(up, 0);
  CHECK(amplitude_of_spins(h, {{0, Spin::Up}}).real() == doctest::Approx(kInvSqrt2));
  CHECK(amplitude_of_spins(h, {{0, Spin::Down}}).real() == doctest::Approx(kInvSqrt2));
  CHECK(states_equal(hadamard(h, 0), up, 1e-12));
}

TEST_CASE("phase_flip flips the Bell-state sign and is an involution") {
  const PureState plus = make_pair(kInvSqrt2, kInvSqrt2, kA1, kB1);
  const PureState minus = make_pair(kInvSqrt2, -kInvSqrt2, kA1, kB1);
  CHECK(states_equal(phase_flip(minus, 0), plus, 1e-12));
  CHECK(states_equal(phase_flip(phase_flip(plus, 0), 0), plus, 1e-12));
  // no down component: unchanged
  const PureState up = make_pair(1.0, 0.0, kA1, kB1);
  CHECK(states_equal(phase_flip(up, 0), up, 1e-15));
}

TEST_CASE("apply_pbs routes the three textual cases of the parity check") {
  const PbsSpec pbs = bob_pbs();

  auto two_electron = [](Spin s1, Spin s3) {
    return PureState::from_terms({{BasisConfig({{1, {kB1, s1}}, {3, {kB3, s3}}}), 1.0}});
  };

  SUBCASE("up,up: one electron in each of c1 and c2") {
    const PureState out = apply_pbs(two_electron(Spin::Up, Spin::Up), pbs);
    const auto& cfg = out.terms().front().config;
    CHECK(cfg.occupancy(kC1) == 1);
    CHECK(cfg.occupancy(kC2) == 1);
  }
  SUBCASE("down,down: one electron in each of c1 and c2") {
    const PureState out = apply_pbs(two_electron(Spin::Down, Spin::Down), pbs);
    const auto& cfg = out.terms().front().config;
    CHECK(cfg.occupancy(kC1) == 1);
    CHECK(cfg.occupancy(kC2) == 1);
  }
  SUBCASE("up,down: both electrons in the lower mode c2") {
    const PureState out = apply_pbs(two_electron(Spin::Up, Spin::Down), pbs);
    CHECK(out.terms().front().config.occupancy(kC2) == 2);
  }
  SUBCASE("down,up: both electrons in the upper mode c1") {
    const PureState out = apply_pbs(two_electron(Spin::Down, Spin::Up), pbs);
    CHECK(out.terms().front().config.occupancy(kC1) == 2);
  }
}

TEST_CASE("apply_pbs refuses occupied output modes") {
  const PureState s =
      PureState::from_terms({{BasisConfig({{1, {kB1, Spin::Up}}, {3, {kC1, Spin::Up}}}), 1.0}});
  CHECK(code_of([&] { apply_pbs(s, bob_pbs()); }) == ErrorCode::Label);
}

TEST_CASE("PbsSpec validates its routing invariants") {
  CHECK(code_of([] { PbsSpec::make(kB1, kB1, kC2, kC1, kC1, kC2); }) == ErrorCode::Label);
  // both inputs send spin-up to the same output
  CHECK(code_of([] { PbsSpec::make(kB1, kB3, kC1, kC2, kC1, kC2); }) == ErrorCode::Label);
  // output equals an input
  CHECK(code_of([] { PbsSpec::make(kB1, kB3, kB1, kC1, kC1, kB1); }) == ErrorCode::Label);
}

TEST_CASE("charge_detect: P(One) = 2|ab|^2 = 0.4608 after the parity PBS") {
  const PureState s = apply_pbs(rotated_four_electron_state(0.8, 0.6), bob_pbs());
  const Projection one = charge_detect_branch(s, kC1, ChargeOutcome::One);
  CHECK(one.probability == doctest::Approx(0.4608).epsilon(1e-12));

  // sampled variant agrees with the branch probabilities
  RandomSource rng(7);
  const ChargeDetection det = charge_detect(s, kC1, rng);
  if (det.outcome == ChargeOutcome::One) {
    CHECK(det.probability == doctest::Approx(0.4608).epsilon(1e-12));
  } else {
    CHECK(det.probability == doctest::Approx(0.5392).epsilon(1e-12));
  }
}

TEST_CASE("charge_detect is trivial on a state with one electron per mode") {
  const PureState s =
      PureState::from_terms({{BasisConfig({{0, {kC1, Spin::Up}}, {1, {kC2, Spin::Up}}}), 1.0}});
  RandomSource rng(3);
  const ChargeDetection det = charge_detect(s, kC1, rng);
  CHECK(det.outcome == ChargeOutcome::One);
  CHECK(det.probability == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(states_equal(det.post, s, 1e-15));
}

TEST_CASE("charge_detect_branch: NotOne branch co-locates the pair with squared coefficients") {
  const PureState s = apply_pbs(rotated_four_electron_state(0.8, 0.6), bob_pbs());
  const Projection fail = charge_detect_branch(s, kC1, ChargeOutcome::NotOne);
  CHECK(fail.probability == doctest::Approx(0.8 * 0.8 * 0.8 * 0.8 + 0.6 * 0.6 * 0.6 * 0.6)
                                .epsilon(1e-12));
  CHECK(fail.probability == doctest::Approx(1.0 - 0.4608).epsilon(1e-12));

  // normalized branch amplitudes: alpha^2 and beta^2 over sqrt(0.5392)
  const double root = std::sqrt(0.5392);
  const Amplitude a2 = amplitude_of_spins(fail.post, {{0, Spin::Up}, {2, Spin::Down}});
  const Amplitude b2 = amplitude_of_spins(fail.post, {{0, Spin::Down}, {2, Spin::Up}});
  CHECK(a2.real() == doctest::Approx(0.64 / root).epsilon(1e-12));
  CHECK(b2.real() == doctest::Approx(0.36 / root).epsilon(1e-12));
  // both Bob-side electrons co-located per branch
  for (const auto& t : fail.post.terms()) {
    const bool both_c1 = t.config.occupancy(kC1) == 2;
    const bool both_c2 = t.config.occupancy(kC2) == 2;
    CHECK((both_c1 || both_c2));
  }
}

TEST_CASE("charge_detect_branch: zero-weight branch is a projection error") {
  // (1, 0) source: after rotation the Bob spins are anti-correlated, no
  // even-parity weight remains.
  const PureState s = apply_pbs(rotated_four_electron_state(1.0, 0.0), bob_pbs());
  CHECK(code_of([&] { charge_detect_branch(s, kC1, ChargeOutcome::One); }) ==
        ErrorCode::Projection);
}

TEST_CASE("measure_z on a Bell state: probability 1/2, remainder collapses") {
  const PureState bell = make_pair(kInvSqrt2, kInvSqrt2, kA1, kB1);
  const Projection up = measure_z_branch(bell, 0, Spin::Up);
  CHECK(up.probability == doctest::Approx(0.5).epsilon(1e-12));
  REQUIRE(up.post.terms().size() == 1);
  CHECK(up.post.electrons().size() == 1);
  CHECK(up.post.terms().front().config.slot_of(1).spin == Spin::Up);

  RandomSource rng(11);
  const SpinMeasurement m = measure_z(bell, 0, rng);
  CHECK(m.probability == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(m.post.electrons().size() == 1);
  CHECK(code_of([&] { measure_z(bell, 9, rng); }) == ErrorCode::Identity);
}

TEST_CASE("measure_mode_z requires single occupancy") {
  const PureState s = apply_pbs(rotated_four_electron_state(0.8, 0.6), bob_pbs());
  const PureState fail = charge_detect_branch(s, kC1, ChargeOutcome::NotOne).post;
  RandomSource rng(5);
  CHECK(code_of([&] { measure_mode_z(fail, kC2, rng); }) == ErrorCode::ProtocolState);
}

TEST_CASE("fidelity basics") {
  const PureState s = make_pair(0.8, 0.6, kA1, kB1);
  CHECK(fidelity(s, s) == doctest::Approx(1.0).epsilon(1e-12));
  const PureState uu = make_pair(1.0, 0.0, kA1, kB1);
  const PureState dd = rotate90(rotate90(uu, 0), 1);
  CHECK(fidelity(uu, dd) == doctest::Approx(0.0));
  const PureState other = make_pair(0.8, 0.6, kA1, kB1, 5);
  CHECK(code_of([&] { fidelity(s, other); }) == ErrorCode::Identity);
}

TEST_CASE("fidelity is insensitive to a global phase") {
  const PureState s = make_pair(0.8, 0.6, kA1, kB1);
  const Amplitude phase = std::polar(1.0, 1.234);
  std::vector<PureState::Term> terms;
  for (const auto& t : s.terms()) terms.push_back({t.config, t.amplitude * phase});
  const PureState rotated = PureState::from_terms(std::move(terms));
  CHECK(fidelity(s, rotated) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("pruning soundness: sub-threshold terms shift no probability") {
  // weight 1e-40 < kPruneThreshold; the retained distribution must agree
  // with the unpruned arithmetic to far better than 1e-12.
  const double eps = 1e-20;
  const double big = std::sqrt(1.0 - eps * eps);
  const PureState s = make_pair(big, eps, kA1, kB1);
  REQUIRE(s.terms().size() == 1);  // the eps term was pruned
  const Projection up = measure_z_branch(s, 0, Spin::Up);
  CHECK(std::abs(up.probability - big * big) < 1e-12);
  CHECK(std::abs(up.probability - 1.0) < 1e-12);
}

// ---------------------------------------------------------------------------
// Property suites over randomized states

TEST_CASE("property: unitaries preserve the norm over 1000 random states") {
  RandomSource rng(2024);
  const PbsSpec pbs = bob_pbs();
  for (int i = 0; i < 1000; ++i) {
    const int n = 1 + static_cast<int>(rng.next_u64() % 4);
    const PureState s = random_state(rng, n, 8);
    const ElectronId e = static_cast<ElectronId>(rng.next_u64() % static_cast<std::uint64_t>(n));
    CHECK(rotate90(s, e).norm_squared() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(hadamard(s, e).norm_squared() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(phase_flip(s, e).norm_squared() == doctest::Approx(1.0).epsilon(1e-12));

    const PureState pin = random_two_mode_state(rng, kB1, kB3);
    CHECK(apply_pbs(pin, pbs).norm_squared() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("property: rotate90, hadamard and phase_flip are involutions") {
  RandomSource rng(99);
  for (int i = 0; i < 1000; ++i) {
    const int n = 1 + static_cast<int>(rng.next_u64() % 4);
    const PureState s = random_state(rng, n, 8);
    const ElectronId e = static_cast<ElectronId>(rng.next_u64() % static_cast<std::uint64_t>(n));
    CHECK(states_equal(rotate90(rotate90(s, e), e), s, 1e-12));
    CHECK(states_equal(hadamard(hadamard(s, e), e), s, 1e-12));
    CHECK(states_equal(phase_flip(phase_flip(s, e), e), s, 1e-12));
  }
}

TEST_CASE("property: measurement branches are complete") {
  RandomSource rng(7777);
  for (int i = 0; i < 1000; ++i) {
    const PureState s = apply_pbs(random_two_mode_state(rng, kB1, kB3), bob_pbs());
    double charge_total = 0.0;
    for (const ChargeOutcome o : {ChargeOutcome::One, ChargeOutcome::NotOne}) {
      try {
        charge_total += charge_detect_branch(s, kC1, o).probability;
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Projection);  // empty branch contributes 0
      }
    }
    CHECK(charge_total == doctest::Approx(1.0).epsilon(1e-12));

    double spin_total = 0.0;
    for (const Spin o : {Spin::Up, Spin::Down}) {
      try {
        spin_total += measure_z_branch(s, 0, o).probability;
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Projection);
      }
    }
    CHECK(spin_total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("property: charge detection leaves spin populations untouched") {
  // law of total probability: sum over outcomes of P(outcome) * P(spin|post)
  // equals P(spin|pre) for every electron and spin.
  RandomSource rng(31415);
  for (int i = 0; i < 1000; ++i) {
    const PureState s = apply_pbs(random_two_mode_state(rng, kB1, kB3), bob_pbs());
    for (const ElectronId e : {0, 1}) {
      for (const Spin spin : {Spin::Up, Spin::Down}) {
        double total = 0.0;
        for (const ChargeOutcome o : {ChargeOutcome::One, ChargeOutcome::NotOne}) {
          try {
            const Projection branch = charge_detect_branch(s, kC1, o);
            total += branch.probability * spin_population(branch.post, e, spin);
          } catch (const Error& err) {
            CHECK(err.code() == ErrorCode::Projection);
          }
        }
        CHECK(total == doctest::Approx(spin_population(s, e, spin)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("property: Pauli exclusion is enforced as a hard fault") {
  // two same-spin electrons pushed into one slot
  CHECK(code_of([] {
    PureState::from_terms(
        {{BasisConfig({{0, {kC1, Spin::Up}}, {1, {kC1, Spin::Up}}}), 1.0}});
  }) == ErrorCode::Exclusion);

  // tensor refuses to stack electrons into an already-used slot via shared labels
  const PureState a = make_pair(1.0, 0.0, kA1, kB1, 0);
  const PureState b = make_pair(1.0, 0.0, kA1, kB1, 2);
  CHECK(code_of([&] { tensor(a, b); }) == ErrorCode::Label);
}

TEST_CASE("measuring every electron leaves a consistent scalar remainder") {
  const PureState bell = make_pair(kInvSqrt2, kInvSqrt2, kA1, kB1);
  const Projection first = measure_z_branch(bell, 0, Spin::Down);
  const Projection second = measure_z_branch(first.post, 1, Spin::Down);
  CHECK(second.probability == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(second.post.electrons().empty());
  CHECK(second.post.norm_squared() == doctest::Approx(1.0).epsilon(1e-12));
  // the spins were perfectly correlated: the opposite branch is empty
  CHECK(code_of([&] { measure_z_branch(first.post, 1, Spin::Up); }) ==
        ErrorCode::Projection);
}

TEST_CASE("PbsSpec::route rejects non-input modes") {
  const PbsSpec pbs = bob_pbs();
  CHECK(code_of([&] { pbs.route(kA1, Spin::Up); }) == ErrorCode::Label);
  CHECK(pbs.route(kB1, Spin::Up) == kC2);
  CHECK(pbs.route(kB3, Spin::Down) == kC2);
}

TEST_CASE("hadamard_mode and measure_mode_z track the occupant per term") {
  // two-term state where different electrons occupy the measured mode
  const PureState s = PureState::from_terms(
      {{BasisConfig({{0, {kC1, Spin::Up}}, {1, {kC2, Spin::Up}}}), kInvSqrt2},
       {BasisConfig({{0, {kC2, Spin::Down}}, {1, {kC1, Spin::Down}}}), kInvSqrt2}});

  const Projection up = measure_mode_z_branch(s, kC2, Spin::Up);
  CHECK(up.probability == doctest::Approx(0.5).epsilon(1e-12));
  // survivor re-keyed to the first term's assignment: one electron in c1
  REQUIRE(up.post.terms().size() == 1);
  CHECK(up.post.electrons().size() == 1);
  CHECK(up.post.terms().front().config.occupancy(kC1) == 1);
  CHECK(up.post.terms().front().config.entries().front().slot.spin == Spin::Up);
}
