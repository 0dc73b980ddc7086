#ifndef RYDBERG_MESSENGER_H
#define RYDBERG_MESSENGER_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes; the nonzero values match the command-line exit codes where they overlap.
 */
typedef enum RmStatus {
  RM_STATUS_OK = 0,
  RM_STATUS_PARSE = 2,
  RM_STATUS_INFEASIBLE = 3,
  RM_STATUS_VERIFICATION = 4,
  RM_STATUS_IO = 5,
  RM_STATUS_INVALID_ARGUMENT = 6,
  RM_STATUS_NULL_POINTER = 7,
  RM_STATUS_PANIC = 8,
} RmStatus;

/**
 * Architecture parameters.
 */
typedef struct RmArch RmArch;

/**
 * Parsed logical circuit.
 */
typedef struct RmCircuit RmCircuit;

/**
 * Scheduled physical program together with the architecture it was planned for.
 */
typedef struct RmSchedule RmSchedule;

typedef struct RmGateCounts {
  uint32_t n1;
  uint32_t n2_cz;
  uint32_t n2_swap;
  uint32_t nr;
} RmGateCounts;

/**
 * Per-operation fidelities; `shuttle_kappa` and `p2` are unused by [`rm_logical_gate_fidelity`].
 */
typedef struct RmCostParams {
  double f1;
  double f2_cz;
  double f2_swap;
  double fr;
  double f_shuttle;
  double shuttle_kappa;
  double p2;
} RmCostParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *rm_last_error(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must be null or a pointer obtained from this library that has not been freed.
 */
void rm_string_free(char *s);

/**
 * Default architecture for `variant` (e.g. `"two-way-belt"`, `"tm"`) on an `L`×`L` lattice.
 *
 * # Safety
 * `variant` must be a valid NUL-terminated string; `out` must be a valid pointer.
 */
enum RmStatus rm_arch_new(const char *variant, uint32_t lattice_size, struct RmArch **out);

/**
 * Architecture from `key=value` text.
 *
 * # Safety
 * `text` must be a valid NUL-terminated string; `out` must be a valid pointer.
 */
enum RmStatus rm_arch_from_config(const char *text, struct RmArch **out);

/**
 * Sets the belt and throw speed in m/s.
 *
 * # Safety
 * `arch` must be a live handle from `rm_arch_new` or `rm_arch_from_config`.
 */
enum RmStatus rm_arch_set_speed(struct RmArch *arch, double speed_mps);

/**
 * # Safety
 * `arch` must be null or a live handle that is not used afterwards.
 */
void rm_arch_free(struct RmArch *arch);

/**
 * Gate counts of the compiled logical CZ between (r1,c1) and (r2,c2).
 *
 * # Safety
 * `arch` must be a live handle; `out` must be a valid pointer.
 */
enum RmStatus rm_gate_counts(const struct RmArch *arch,
                             uint32_t r1,
                             uint32_t c1,
                             uint32_t r2,
                             uint32_t c2,
                             struct RmGateCounts *out);

/**
 * Checks the compiled CZ on the standard inputs. Writes the smallest branch fidelity to
 * `min_fidelity` and returns `RM_STATUS_VERIFICATION` if any branch fails.
 *
 * # Safety
 * `arch` must be a live handle; `min_fidelity` must be a valid pointer.
 */
enum RmStatus rm_verify_pair(const struct RmArch *arch,
                             uint32_t r1,
                             uint32_t c1,
                             uint32_t r2,
                             uint32_t c2,
                             double *min_fidelity);

/**
 * Parses program source (`lattice L` header, then `cz`/`h`/`z`/`x` lines).
 *
 * # Safety
 * `source` must be a valid NUL-terminated string; `out` must be a valid pointer.
 */
enum RmStatus rm_circuit_parse(const char *source, struct RmCircuit **out);

/**
 * # Safety
 * `circuit` must be null or a live handle that is not used afterwards.
 */
void rm_circuit_free(struct RmCircuit *circuit);

/**
 * Schedules `circuit` on `arch`; the circuit's lattice size takes precedence.
 *
 * # Safety
 * `circuit` and `arch` must be live handles; `out` must be a valid pointer.
 */
enum RmStatus rm_schedule(const struct RmCircuit *circuit,
                          const struct RmArch *arch,
                          struct RmSchedule **out);

/**
 * # Safety
 * `schedule` must be a live handle; `out` must be a valid pointer.
 */
enum RmStatus rm_schedule_makespan(const struct RmSchedule *schedule, double *out);

/**
 * # Safety
 * `schedule` must be a live handle; `out` must be a valid pointer.
 */
enum RmStatus rm_schedule_event_count(const struct RmSchedule *schedule, size_t *out);

/**
 * Number of constraint violations found in the schedule; zero for any schedule this library produced.
 *
 * # Safety
 * `schedule` must be a live handle; `out` must be a valid pointer.
 */
enum RmStatus rm_schedule_conflict_count(const struct RmSchedule *schedule,
                                         size_t *out);

/**
 * Event list as JSON lines. Release the string with `rm_string_free`.
 *
 * # Safety
 * `schedule` must be a live handle; `out` must be a valid pointer.
 */
enum RmStatus rm_schedule_to_jsonl(const struct RmSchedule *schedule, char **out);

/**
 * # Safety
 * `schedule` must be null or a live handle that is not used afterwards.
 */
void rm_schedule_free(struct RmSchedule *schedule);

/**
 * Product of per-operation fidelities raised to their counts.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum RmStatus rm_logical_gate_fidelity(struct RmGateCounts counts,
                                       struct RmCostParams params,
                                       double *out);

/**
 * SWAP-chain baseline for (r1,c1)-(r2,c2) on an `L`×`L` lattice: writes exp(-p2·L)
 * to `asymptotic` and (1-p2)^n2 to `exact`. Either output may be null.
 *
 * # Safety
 * `asymptotic` and `exact` must each be null or valid pointers.
 */
enum RmStatus rm_neighbor_chain_fidelity(uint32_t lattice_size,
                                         uint32_t r1,
                                         uint32_t c1,
                                         uint32_t r2,
                                         uint32_t c2,
                                         double p2,
                                         double *asymptotic,
                                         double *exact);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RYDBERG_MESSENGER_H */
