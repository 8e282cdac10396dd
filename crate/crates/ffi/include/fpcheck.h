#ifndef FPCHECK_H
#define FPCHECK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum FpcError {
  FPC_ERROR_OK = 0,
  FPC_ERROR_NULL_ARGUMENT = 1,
  FPC_ERROR_INVALID_UTF8 = 2,
  /**
   * The program text was rejected; see `fpc_last_error`.
   */
  FPC_ERROR_PARSE = 3,
  FPC_ERROR_INVALID_ARGUMENT = 4,
  /**
   * The solver detected an inconsistency; please report it.
   */
  FPC_ERROR_INTERNAL = 5,
  FPC_ERROR_PANIC = 6,
} FpcError;

typedef enum FpcStrategy {
  FPC_STRATEGY_STD = 0,
  FPC_STRATEGY_FPC = 1,
  FPC_STRATEGY_FP3S = 2,
} FpcStrategy;

/**
 * Answer of a solve.
 */
typedef enum FpcOutcome {
  FPC_OUTCOME_SAT = 0,
  FPC_OUTCOME_UNSAT = 1,
  FPC_OUTCOME_NOT_FOUND = 2,
  FPC_OUTCOME_UNKNOWN = 3,
} FpcOutcome;

/**
 * A parsed binary32 program.
 */
typedef struct FpcProgram FpcProgram;

/**
 * The outcome of a solve.
 */
typedef struct FpcReport FpcReport;

typedef struct FpcSolveOptions {
  enum FpcStrategy strategy;
  uint32_t unroll;
  /**
   * Wall-clock budget; must be positive.
   */
  uint64_t timeout_ms;
  /**
   * Node budget; 0 means unlimited.
   */
  uint64_t node_limit;
  /**
   * Annotation index, or -1 to use the only annotation of the program.
   */
  int64_t suspect;
} FpcSolveOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next call into this library on the same thread.
 */
const char *fpc_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed already.
 */
void fpc_string_free(char *s);

/**
 * Parses a program in the annotated language. On success `*out` owns a new
 * handle.
 *
 * # Safety
 * `source` must be a NUL-terminated string and `out` a valid pointer.
 */
enum FpcError fpc_program_parse(const char *source, struct FpcProgram **out);

/**
 * # Safety
 * `p` must be null or a handle from `fpc_program_parse` not yet freed.
 */
void fpc_program_free(struct FpcProgram *p);

/**
 * Number of declared inputs.
 *
 * # Safety
 * `p` must be a live program handle.
 */
size_t fpc_program_input_count(const struct FpcProgram *p);

/**
 * Number of `@suspect` annotations.
 *
 * # Safety
 * `p` must be a live program handle.
 */
size_t fpc_program_suspect_count(const struct FpcProgram *p);

/**
 * Defaults: fpc, 10 unrollings, 180 s, no node limit, the only annotation.
 */
struct FpcSolveOptions fpc_solve_options_default(void);

/**
 * Searches for inputs reaching an annotation. `options` may be null for
 * the defaults. On success `*out` owns a new report handle.
 *
 * # Safety
 * `p` must be a live program handle, `options` null or valid, `out` valid.
 */
enum FpcError fpc_solve(const struct FpcProgram *p,
                        const struct FpcSolveOptions *options,
                        struct FpcReport **out);

/**
 * # Safety
 * `r` must be null or a handle from `fpc_solve` not yet freed.
 */
void fpc_report_free(struct FpcReport *r);

/**
 * # Safety
 * `r` must be a live report handle.
 */
enum FpcOutcome fpc_report_outcome(const struct FpcReport *r);

/**
 * Whether the witness was re-run on the program and reached the interval.
 *
 * # Safety
 * `r` must be a live report handle.
 */
bool fpc_report_verified(const struct FpcReport *r);

/**
 * Bit pattern of the witness value for input `name`. Fails unless the
 * outcome is `Sat` and `name` is an input.
 *
 * # Safety
 * `r` must be a live report handle, `name` a NUL-terminated string and
 * `bits` a valid pointer.
 */
enum FpcError fpc_report_witness_bits(const struct FpcReport *r, const char *name, uint32_t *bits);

/**
 * The report as JSON. The caller releases it with `fpc_string_free`.
 *
 * # Safety
 * `r` must be a live report handle.
 */
char *fpc_report_json(const struct FpcReport *r);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FPCHECK_H */
