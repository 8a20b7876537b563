#include "spinconc.h"

#include <cmath>
#include <string>
#include <utility>

#include "spinconc/analysis.hpp"
#include "spinconc/protocol.hpp"

using namespace spinconc;

struct spinconc_rng {
  RandomSource source;
};

struct spinconc_yield_report {
  YieldReport report;
};

struct spinconc_mc_report {
  MonteCarloReport report;
};

namespace {

thread_local std::string g_last_error;

spinconc_status status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::Normalization: return SPINCONC_ERR_NORMALIZATION;
    case ErrorCode::Label: return SPINCONC_ERR_LABEL;
    case ErrorCode::Identity: return SPINCONC_ERR_IDENTITY;
    case ErrorCode::Projection: return SPINCONC_ERR_PROJECTION;
    case ErrorCode::Exclusion: return SPINCONC_ERR_EXCLUSION;
    case ErrorCode::Domain: return SPINCONC_ERR_DOMAIN;
    case ErrorCode::ProtocolState: return SPINCONC_ERR_PROTOCOL_STATE;
    case ErrorCode::Io: return SPINCONC_ERR_IO;
    case ErrorCode::InvalidArgument: return SPINCONC_ERR_INVALID_ARGUMENT;
    case ErrorCode::Internal: return SPINCONC_ERR_INTERNAL;
  }
  return SPINCONC_ERR_INTERNAL;
}

template <typename Fn>
spinconc_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return SPINCONC_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SPINCONC_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return SPINCONC_ERR_INTERNAL;
  }
}

spinconc_status require(bool ok, const char* message) {
  if (ok) return SPINCONC_OK;
  g_last_error = message;
  return SPINCONC_ERR_INVALID_ARGUMENT;
}

PairSpec pair_from_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::Domain,
                "alpha = " + std::to_string(alpha) + " outside (0, 1)");
  }
  return PairSpec(alpha, std::sqrt(1.0 - alpha * alpha));
}

void fill_result(const RoundOutcome& outcome, double s, spinconc_round_result* out) {
  out->success = outcome.tag == RoundOutcome::Tag::Success ? 1 : 0;
  out->branch_probability = outcome.branch_probability;
  out->success_probability = 2.0 * s * (1.0 - s);
  out->phase_flip_applied = outcome.correction == Correction::PhaseFlip ? 1 : 0;
  out->fidelity = outcome.success_fidelity;
  if (outcome.failure_spec.has_value()) {
    out->next_alpha = outcome.failure_spec->alpha().real();
    out->next_beta = outcome.failure_spec->beta().real();
  } else {
    out->next_alpha = 0.0;
    out->next_beta = 0.0;
  }
}

}  // namespace

extern "C" {

const char* spinconc_version(void) { return "1.0.0"; }

const char* spinconc_status_name(spinconc_status status) {
  switch (status) {
    case SPINCONC_OK: return "ok";
    case SPINCONC_ERR_NORMALIZATION: return "normalization error";
    case SPINCONC_ERR_LABEL: return "label error";
    case SPINCONC_ERR_IDENTITY: return "identity error";
    case SPINCONC_ERR_PROJECTION: return "projection error";
    case SPINCONC_ERR_EXCLUSION: return "exclusion error";
    case SPINCONC_ERR_DOMAIN: return "domain error";
    case SPINCONC_ERR_PROTOCOL_STATE: return "protocol-state error";
    case SPINCONC_ERR_IO: return "io error";
    case SPINCONC_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SPINCONC_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* spinconc_last_error(void) { return g_last_error.c_str(); }

spinconc_status spinconc_rng_new(uint64_t seed, spinconc_rng** out) {
  if (auto bad = require(out != nullptr, "out is null")) return bad;
  return guarded([&] { *out = new spinconc_rng{RandomSource(seed)}; });
}

void spinconc_rng_free(spinconc_rng* rng) { delete rng; }

spinconc_status spinconc_run_round(double alpha, spinconc_rng* rng,
                                   spinconc_round_result* out) {
  if (auto bad = require(rng != nullptr && out != nullptr, "rng or out is null")) return bad;
  return guarded([&] {
    const PairSpec spec = pair_from_alpha(alpha);
    fill_result(run_round(spec, rng->source), spec.s(), out);
  });
}

spinconc_status spinconc_run_ghz_round(double alpha, int32_t parties, uint64_t u_mask,
                                       spinconc_rng* rng, spinconc_round_result* out) {
  if (auto bad = require(rng != nullptr && out != nullptr, "rng or out is null")) return bad;
  return guarded([&] {
    const PairSpec pair = pair_from_alpha(alpha);
    if (parties < 2 || parties > 64) {
      throw Error(ErrorCode::Domain, "parties must be in [2, 64]");
    }
    std::vector<Spin> u_register;
    for (int32_t i = 0; i < parties - 2; ++i) {
      u_register.push_back((u_mask >> i) & 1 ? Spin::Down : Spin::Up);
    }
    const GhzSpec spec(parties, pair.alpha(), pair.beta(), std::move(u_register));
    fill_result(run_ghz_round(spec, rng->source), spec.s(), out);
  });
}

spinconc_status spinconc_success_probability(double s, double* out) {
  if (auto bad = require(out != nullptr, "out is null")) return bad;
  return guarded([&] { *out = success_probability(s); });
}

spinconc_status spinconc_next_s(double s, double* out) {
  if (auto bad = require(out != nullptr, "out is null")) return bad;
  return guarded([&] { *out = next_s(s); });
}

spinconc_status spinconc_yield_compute(double s0, int32_t max_rounds,
                                       spinconc_yield_report** out) {
  if (auto bad = require(out != nullptr, "out is null")) return bad;
  return guarded([&] {
    *out = new spinconc_yield_report{iterated_yield(s0, max_rounds)};
  });
}

int32_t spinconc_yield_rounds(const spinconc_yield_report* report) {
  return report ? static_cast<int32_t>(report->report.per_round.size()) : 0;
}

spinconc_status spinconc_yield_row(const spinconc_yield_report* report, int32_t k,
                                   double* s_k, double* p_k, double* cumulative_yield) {
  if (auto bad = require(report != nullptr, "report is null")) return bad;
  if (auto bad = require(k >= 1 && k <= spinconc_yield_rounds(report), "row index out of range")) {
    return bad;
  }
  const YieldRow& row = report->report.per_round[static_cast<std::size_t>(k - 1)];
  if (s_k != nullptr) *s_k = row.s;
  if (p_k != nullptr) *p_k = row.p;
  if (cumulative_yield != nullptr) *cumulative_yield = row.cumulative_yield;
  return SPINCONC_OK;
}

double spinconc_yield_total(const spinconc_yield_report* report) {
  return report ? report->report.total_yield : 0.0;
}

double spinconc_yield_baseline(const spinconc_yield_report* report) {
  return report ? report->report.baseline_yield : 0.0;
}

void spinconc_yield_free(spinconc_yield_report* report) { delete report; }

spinconc_status spinconc_monte_carlo(double s0, int64_t trials, int32_t max_rounds,
                                     uint64_t seed, spinconc_mc_report** out) {
  if (auto bad = require(out != nullptr, "out is null")) return bad;
  return guarded([&] {
    *out = new spinconc_mc_report{monte_carlo(s0, trials, max_rounds, seed)};
  });
}

int64_t spinconc_mc_trials(const spinconc_mc_report* report) {
  return report ? report->report.trials : 0;
}

int32_t spinconc_mc_rounds(const spinconc_mc_report* report) {
  return report ? report->report.max_rounds : 0;
}

int64_t spinconc_mc_successes_at(const spinconc_mc_report* report, int32_t k) {
  if (report == nullptr || k < 1 ||
      k > static_cast<int32_t>(report->report.success_counts_per_round.size())) {
    return -1;
  }
  return report->report.success_counts_per_round[static_cast<std::size_t>(k - 1)];
}

int64_t spinconc_mc_unresolved(const spinconc_mc_report* report) {
  return report ? report->report.unresolved : 0;
}

double spinconc_mc_estimated_yield(const spinconc_mc_report* report) {
  return report ? report->report.estimated_yield : 0.0;
}

double spinconc_mc_standard_error(const spinconc_mc_report* report) {
  return report ? report->report.standard_error : 0.0;
}

void spinconc_mc_free(spinconc_mc_report* report) { delete report; }

}  // extern "C"
