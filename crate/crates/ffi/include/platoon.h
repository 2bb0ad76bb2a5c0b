#ifndef PLATOON_H
#define PLATOON_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum PlatoonStatus {
  PLATOON_STATUS_OK = 0,
  PLATOON_STATUS_NULL_POINTER = 1,
  PLATOON_STATUS_INVALID_UTF8 = 2,
  PLATOON_STATUS_CONFIG = 3,
  PLATOON_STATUS_INVALID_PARAMETER = 4,
  PLATOON_STATUS_SIMULATION = 5,
  PLATOON_STATUS_OUT_OF_RANGE = 6,
  PLATOON_STATUS_IO = 7,
  PLATOON_STATUS_PANIC = 8,
} PlatoonStatus;

/**
 * Parsed scenario, ready to run.
 */
typedef struct PlatoonScenario PlatoonScenario;

/**
 * Recorded run.
 */
typedef struct PlatoonTrajectory PlatoonTrajectory;

/**
 * One vehicle at one grid point.
 */
typedef struct PlatoonSample {
  double grid;
  double t;
  double s;
  double v;
  double a;
  double u;
  double w;
  double delta;
  double delta0;
  double delta1;
  double delta2;
  double e1;
  double e2;
  double y;
} PlatoonSample;

/**
 * Feedback gains and closed-loop poles `re ± i·im`.
 */
typedef struct PlatoonGains {
  double k1;
  double k2;
  double eig_re[2];
  double eig_im[2];
} PlatoonGains;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on the calling thread, or null.
 * Valid until the next call into this library from the same thread.
 */
const char *platoon_last_error(void);

/**
 * Static, NUL-terminated version string.
 */
const char *platoon_version(void);

/**
 * Parse a TOML configuration into a scenario handle.
 *
 * # Safety
 * `toml` must be a NUL-terminated string and `out` a valid pointer.
 */
enum PlatoonStatus platoon_scenario_from_toml(const char *toml, struct PlatoonScenario **out);

/**
 * Override the RNG seed of a scenario.
 *
 * # Safety
 * `scenario` must come from [`platoon_scenario_from_toml`].
 */
enum PlatoonStatus platoon_scenario_set_seed(struct PlatoonScenario *scenario, uint64_t seed);

/**
 * Number of vehicles, leader included; 0 for a null handle.
 *
 * # Safety
 * `scenario` must be null or come from [`platoon_scenario_from_toml`].
 */
size_t platoon_scenario_vehicles(const struct PlatoonScenario *scenario);

/**
 * # Safety
 * `scenario` must be null or come from [`platoon_scenario_from_toml`], and
 * not be used afterwards.
 */
void platoon_scenario_free(struct PlatoonScenario *scenario);

/**
 * Run a scenario in its configured domain.
 *
 * # Safety
 * `scenario` must be a live scenario handle and `out` a valid pointer.
 */
enum PlatoonStatus platoon_run(const struct PlatoonScenario *scenario,
                               struct PlatoonTrajectory **out);

/**
 * Grid points recorded; 0 for a null handle.
 *
 * # Safety
 * `traj` must be null or a live trajectory handle.
 */
size_t platoon_trajectory_len(const struct PlatoonTrajectory *traj);

/**
 * Vehicles recorded; 0 for a null handle.
 *
 * # Safety
 * `traj` must be null or a live trajectory handle.
 */
size_t platoon_trajectory_vehicles(const struct PlatoonTrajectory *traj);

/**
 * Copy grid point `k` of `vehicle` into `out`.
 *
 * # Safety
 * `traj` must be a live trajectory handle and `out` a valid pointer.
 */
enum PlatoonStatus platoon_trajectory_sample(const struct PlatoonTrajectory *traj,
                                             size_t k,
                                             size_t vehicle,
                                             struct PlatoonSample *out);

/**
 * Write the trajectory CSV to `path`.
 *
 * # Safety
 * `traj` must be a live trajectory handle and `path` a NUL-terminated string.
 */
enum PlatoonStatus platoon_trajectory_write_csv(const struct PlatoonTrajectory *traj,
                                                const char *path);

/**
 * # Safety
 * `traj` must be null or a live trajectory handle, and not be used afterwards.
 */
void platoon_trajectory_free(struct PlatoonTrajectory *traj);

/**
 * Pole-placement gains for `(ω₀, ζ₀, κ)`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum PlatoonStatus platoon_make_gains(double omega0,
                                      double zeta0,
                                      double kappa,
                                      struct PlatoonGains *out);

/**
 * Uniform bound on `sup |x_i|` over a cascade with the given ISS data.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum PlatoonStatus platoon_cascade_bound(double c,
                                         double lambda,
                                         double gamma_bar,
                                         double sigma_bar,
                                         double x0_bound,
                                         double w_bound,
                                         double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PLATOON_H */
