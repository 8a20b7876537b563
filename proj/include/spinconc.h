/*
 * C API of the spinconc engine: entanglement concentration for electron
 * spin qubits with charge-parity detection.
 *
 * All functions return a spinconc_status; out-parameters are written only
 * on SPINCONC_OK. Objects returned through handle out-parameters are owned
 * by the caller and released with the matching *_free function. Handles are
 * not thread-safe; distinct handles may be used concurrently.
 */
#ifndef SPINCONC_H
#define SPINCONC_H

#include <stdint.h>

#if defined(_WIN32) && defined(SPINCONC_BUILD_SHARED)
#define SPINCONC_API __declspec(dllexport)
#else
#define SPINCONC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum spinconc_status {
  SPINCONC_OK = 0,
  SPINCONC_ERR_NORMALIZATION = 1,
  SPINCONC_ERR_LABEL = 2,
  SPINCONC_ERR_IDENTITY = 3,
  SPINCONC_ERR_PROJECTION = 4,
  SPINCONC_ERR_EXCLUSION = 5,
  SPINCONC_ERR_DOMAIN = 6,
  SPINCONC_ERR_PROTOCOL_STATE = 7,
  SPINCONC_ERR_IO = 8,
  SPINCONC_ERR_INVALID_ARGUMENT = 9,
  SPINCONC_ERR_INTERNAL = 10
} spinconc_status;

/* Library version, e.g. "1.0.0". */
SPINCONC_API const char* spinconc_version(void);

/* Static description of a status code. */
SPINCONC_API const char* spinconc_status_name(spinconc_status status);

/* Detail message of the most recent error on this thread ("" if none). */
SPINCONC_API const char* spinconc_last_error(void);

/* ------------------------------------------------------------------ */
/* Random streams                                                      */

typedef struct spinconc_rng spinconc_rng;

/* Deterministic platform-independent stream (xoshiro256** seeded via
 * SplitMix64); identical seeds reproduce identical protocol runs. */
SPINCONC_API spinconc_status spinconc_rng_new(uint64_t seed, spinconc_rng** out);
SPINCONC_API void spinconc_rng_free(spinconc_rng* rng);

/* ------------------------------------------------------------------ */
/* Protocol rounds                                                     */

typedef struct spinconc_round_result {
  int32_t success;            /* 1 on success, 0 on failure */
  double branch_probability;  /* probability of the observed branch */
  double success_probability; /* 2 s (1-s) for the input coefficients */
  int32_t phase_flip_applied; /* 1 if the correction was a phase flip */
  double fidelity;            /* success only: vs the maximally entangled target */
  double next_alpha;          /* failure only: recycled source coefficients */
  double next_beta;
} spinconc_round_result;

/* One concentration round for a pair source alpha|uu> + beta|dd> with
 * real alpha in (0, 1); beta is sqrt(1 - alpha^2). */
SPINCONC_API spinconc_status spinconc_run_round(double alpha, spinconc_rng* rng,
                                                spinconc_round_result* out);

/* n-party GHZ-class round; parties >= 2 reduces to spinconc_run_round at
 * parties == 2. Bit i of u_mask selects spin-down for register electron i
 * (the |u> basis state); registers beyond parties - 2 are ignored. */
SPINCONC_API spinconc_status spinconc_run_ghz_round(double alpha, int32_t parties,
                                                    uint64_t u_mask, spinconc_rng* rng,
                                                    spinconc_round_result* out);

/* ------------------------------------------------------------------ */
/* Closed-form analysis                                                */

/* 2 s (1-s) for s in [0, 1]. */
SPINCONC_API spinconc_status spinconc_success_probability(double s, double* out);

/* Failure recursion s^2 / (s^2 + (1-s)^2) for s strictly inside (0, 1). */
SPINCONC_API spinconc_status spinconc_next_s(double s, double* out);

typedef struct spinconc_yield_report spinconc_yield_report;

/* Expected maximal pairs per source pair with failed rounds recycled. */
SPINCONC_API spinconc_status spinconc_yield_compute(double s0, int32_t max_rounds,
                                                    spinconc_yield_report** out);
SPINCONC_API int32_t spinconc_yield_rounds(const spinconc_yield_report* report);
/* Row k (1-based): coefficient s_k, round success probability p_k and the
 * cumulative yield through round k. */
SPINCONC_API spinconc_status spinconc_yield_row(const spinconc_yield_report* report,
                                                int32_t k, double* s_k, double* p_k,
                                                double* cumulative_yield);
SPINCONC_API double spinconc_yield_total(const spinconc_yield_report* report);
SPINCONC_API double spinconc_yield_baseline(const spinconc_yield_report* report);
SPINCONC_API void spinconc_yield_free(spinconc_yield_report* report);

/* ------------------------------------------------------------------ */
/* Monte Carlo                                                         */

typedef struct spinconc_mc_report spinconc_mc_report;

/* Runs `trials` seeded trajectories through the full state-vector
 * pipeline; identical arguments produce bit-identical reports. */
SPINCONC_API spinconc_status spinconc_monte_carlo(double s0, int64_t trials,
                                                  int32_t max_rounds, uint64_t seed,
                                                  spinconc_mc_report** out);
SPINCONC_API int64_t spinconc_mc_trials(const spinconc_mc_report* report);
SPINCONC_API int32_t spinconc_mc_rounds(const spinconc_mc_report* report);
/* Trajectories that first succeeded in round k (1-based); -1 on bad k. */
SPINCONC_API int64_t spinconc_mc_successes_at(const spinconc_mc_report* report, int32_t k);
/* Trajectories with no success within max_rounds. */
SPINCONC_API int64_t spinconc_mc_unresolved(const spinconc_mc_report* report);
SPINCONC_API double spinconc_mc_estimated_yield(const spinconc_mc_report* report);
SPINCONC_API double spinconc_mc_standard_error(const spinconc_mc_report* report);
SPINCONC_API void spinconc_mc_free(spinconc_mc_report* report);

#ifdef __cplusplus
}
#endif

#endif /* SPINCONC_H */
