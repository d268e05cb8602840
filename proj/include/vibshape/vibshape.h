/*
 * vibshape C API.
 *
 * Every object is an opaque handle created by a vs_*_create/read/... call and
 * released with the matching vs_*_free. Functions return a vs_status; on
 * failure vs_last_error() describes the problem for the calling thread.
 * Handles are immutable after creation and may be shared between threads.
 */
#ifndef VIBSHAPE_H
#define VIBSHAPE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(VIBSHAPE_BUILDING)
#define VS_API __declspec(dllexport)
#else
#define VS_API __declspec(dllimport)
#endif
#else
#define VS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum vs_status {
  VS_OK = 0,
  VS_ERR_PARAMETER_DOMAIN = 1,
  VS_ERR_INPUT = 2,
  VS_ERR_INSUFFICIENT_DATA = 3,
  VS_ERR_NO_MODES = 4,
  VS_ERR_ESTIMATION = 5,
  VS_ERR_GRID = 6,
  VS_ERR_OUT_OF_DOMAIN = 7,
  VS_ERR_CONFIG = 8,
  VS_ERR_UNDEFINED_REDUCTION = 9,
  VS_ERR_PARSE = 10,
  VS_ERR_IO = 11,
  VS_ERR_NULL_ARGUMENT = 12,
  VS_ERR_INTERNAL = 13
} vs_status;

typedef struct vs_shaper vs_shaper;         /* impulse sequence */
typedef struct vs_trajectory vs_trajectory; /* multi-channel joint command */
typedef struct vs_trace vs_trace;           /* tip acceleration trace */
typedef struct vs_map vs_map;               /* joint-space frequency map */
typedef struct vs_plant vs_plant;           /* simulated arm */
typedef struct vs_sim_result vs_sim_result;
typedef struct vs_report vs_report;         /* reduction table */

/* ---- errors ------------------------------------------------------------ */

/* Message of the last failure on this thread; never NULL. */
VS_API const char* vs_last_error(void);
VS_API const char* vs_status_name(vs_status status);
VS_API const char* vs_version(void);

/* ---- shapers ----------------------------------------------------------- */

VS_API vs_status vs_shaper_identity(vs_shaper** out);
/* Two impulses: 1/(1+k0) at 0 and k0/(1+k0) at t0. */
VS_API vs_status vs_shaper_zv(double t0, double k0, vs_shaper** out);
/* Arbitrary impulse train; validated (times increasing from 0, sum 1). */
VS_API vs_status vs_shaper_from_impulses(const double* amplitudes, const double* times, size_t count,
                                         vs_shaper** out);
VS_API vs_status vs_shaper_cascade(const vs_shaper* a, const vs_shaper* b, vs_shaper** out);
VS_API void vs_shaper_free(vs_shaper* shaper);

VS_API size_t vs_shaper_size(const vs_shaper* shaper);
VS_API vs_status vs_shaper_impulse(const vs_shaper* shaper, size_t index, double* amplitude, double* time);
VS_API double vs_shaper_total_delay(const vs_shaper* shaper);
VS_API vs_status vs_shaper_response(const vs_shaper* shaper, double freq_hz, double* magnitude, double* phase_rad);
/* Linearly spaced Bode data; each output array holds `points` values. */
VS_API vs_status vs_shaper_bode(const vs_shaper* shaper, double f_min, double f_max, size_t points,
                                double* freq_hz, double* magnitude_db, double* phase_deg);
VS_API vs_status vs_k0_from_damping_ratio(double zeta, double* k0);

/* ---- trajectories ------------------------------------------------------ */

/* `samples` is channel-major: channel c occupies samples[c*length .. ). */
VS_API vs_status vs_trajectory_create(double sample_rate, double start_time, size_t channels, size_t length,
                                      const double* samples, vs_trajectory** out);
/* Step from `from` to `to` after `pre_time` seconds, held for `hold_time`. */
VS_API vs_status vs_trajectory_step(const double* from, const double* to, size_t joints, double sample_rate,
                                    double pre_time, double hold_time, vs_trajectory** out);
VS_API vs_status vs_trajectory_read_csv(const char* path, vs_trajectory** out);
VS_API vs_status vs_trajectory_write_csv(const vs_trajectory* traj, const char* path);
VS_API void vs_trajectory_free(vs_trajectory* traj);

VS_API size_t vs_trajectory_channels(const vs_trajectory* traj);
VS_API size_t vs_trajectory_length(const vs_trajectory* traj);
VS_API double vs_trajectory_sample_rate(const vs_trajectory* traj);
VS_API double vs_trajectory_start_time(const vs_trajectory* traj);
VS_API vs_status vs_trajectory_sample(const vs_trajectory* traj, size_t channel, size_t index, double* value);

VS_API vs_status vs_shaper_apply(const vs_shaper* shaper, const vs_trajectory* traj, vs_trajectory** out);

/* ---- traces and identification ------------------------------------------ */

VS_API vs_status vs_trace_create(double sample_rate, double start_time, const double* samples, size_t count,
                                 double motion_end_time, vs_trace** out);
/* Pass NaN for motion_end_time to take it from the file's comment line. */
VS_API vs_status vs_trace_read_csv(const char* path, double motion_end_time, vs_trace** out);
VS_API vs_status vs_trace_write_csv(const vs_trace* trace, const char* path);
VS_API void vs_trace_free(vs_trace* trace);
VS_API size_t vs_trace_length(const vs_trace* trace);

typedef struct vs_identify_options {
  int max_modes;               /* default 2 */
  double min_prominence;       /* fraction of global max, default 0.2 */
  double low_cutoff_hz;        /* default 0.5 */
  int zero_pad_factor;         /* default 4 */
  double lowest_mode_hz;       /* residual must span 2 periods; default 1.0 */
} vs_identify_options;

VS_API void vs_identify_options_default(vs_identify_options* options);

typedef struct vs_peak {
  double frequency_hz;
  double magnitude;
} vs_peak;

/* Writes up to `capacity` peaks (ascending frequency) and their count. When
 * spectrum_csv_path is non-NULL the full spectrum is written there. */
VS_API vs_status vs_identify(const vs_trace* trace, const vs_identify_options* options, vs_peak* peaks,
                             size_t capacity, size_t* count, const char* spectrum_csv_path);
/* Damping factor of one mode from the residual of the trace. */
VS_API vs_status vs_estimate_k0(const vs_trace* trace, double mode_freq_hz, double lowest_mode_hz, double* k0);

/* ---- frequency maps ------------------------------------------------------- */

/* `poses` is measurement-major (count x joints); `freqs` is count x modes. */
VS_API vs_status vs_map_build(const double* poses, size_t joints, const double* freqs, size_t modes, size_t count,
                              vs_map** out);
VS_API vs_status vs_map_read(const char* path, vs_map** out);
VS_API vs_status vs_map_write(const vs_map* map, const char* path);
VS_API void vs_map_free(vs_map* map);

VS_API size_t vs_map_dimension(const vs_map* map);
VS_API size_t vs_map_modes(const vs_map* map);
VS_API size_t vs_map_axis_size(const vs_map* map, size_t axis);
VS_API vs_status vs_map_axis_value(const vs_map* map, size_t axis, size_t index, double* value);
/* Node value by flat row-major index (first axis slowest). */
VS_API vs_status vs_map_node_value(const vs_map* map, size_t mode, size_t flat_index, double* value);

/* VS_ERR_OUT_OF_DOMAIN outside the grid. */
VS_API vs_status vs_map_interpolate(const vs_map* map, const double* pose, size_t joints, size_t mode, double* hz);
/* Up to `limit_cells` boundary-cell widths outside; *extrapolated set to 1
 * when the pose lies outside the grid. */
VS_API vs_status vs_map_extrapolate(const vs_map* map, const double* pose, size_t joints, size_t mode,
                                    double limit_cells, double* hz, int* extrapolated);

/* k0_fixed > 0 selects a fixed damping factor; 0 uses the map's k0 data. */
VS_API vs_status vs_map_shaper_params(const vs_map* map, const double* pose, size_t joints, size_t mode,
                                      double k0_fixed, int allow_extrapolation, double* t0, double* k0);
/* One ZV per listed mode, cascaded in ascending frequency. count == 0 gives
 * the identity shaper. */
VS_API vs_status vs_map_design_shaper(const vs_map* map, const double* pose, size_t joints, const size_t* modes,
                                      size_t mode_count, double k0_fixed, int allow_extrapolation,
                                      vs_shaper** out);

/* ---- simulation ---------------------------------------------------------- */

VS_API vs_status vs_plant_default(vs_plant** out);
VS_API vs_status vs_plant_read(const char* path, vs_plant** out);
VS_API vs_status vs_plant_write(const vs_plant* plant, const char* path);
/* Copy with a different seed / sample rate (<= 0 keeps the current rate). */
VS_API vs_status vs_plant_with(const vs_plant* plant, uint64_t seed, double sample_rate, vs_plant** out);
VS_API double vs_plant_sample_rate(const vs_plant* plant);
VS_API uint64_t vs_plant_seed(const vs_plant* plant);
VS_API void vs_plant_free(vs_plant* plant);

VS_API vs_status vs_simulate(const vs_plant* plant, const vs_trajectory* command, vs_sim_result** out);
VS_API void vs_sim_result_free(vs_sim_result* result);
VS_API double vs_sim_result_command_end(const vs_sim_result* result);
VS_API vs_status vs_sim_result_residual(const vs_sim_result* result, double settle_guard, double* peak_to_peak);
VS_API vs_status vs_sim_result_write_csv(const vs_sim_result* result, const char* path);
/* Acceleration as a trace with motion_end_time = command end. */
VS_API vs_status vs_sim_result_trace(const vs_sim_result* result, vs_trace** out);

/* ---- campaign and verification ------------------------------------------ */

typedef struct vs_campaign_options {
  const double* axis_values; /* all axes concatenated */
  const size_t* axis_sizes;  /* points per axis */
  size_t joints;
  const double* step_from;   /* joints values */
  double pre_time;           /* default 1 s */
  double hold_time;          /* default 20 s */
  double k0;                 /* stored in the map, default 1 */
  vs_identify_options identify;
} vs_campaign_options;

/* Fills defaults for a 2-joint {0,30,60,90}^2 grid stepped from (-30, -30). */
VS_API void vs_campaign_options_default(vs_campaign_options* options);

/* Simulate the campaign, identify every node and build the map. When
 * trace_dir is non-NULL each node's trace is also written there. */
VS_API vs_status vs_campaign_simulate(const vs_plant* plant, const vs_campaign_options* options,
                                      const char* trace_dir, vs_map** out);
/* Build the map from recorded traces trace_<q1>_<q2>...csv in trace_dir. */
VS_API vs_status vs_campaign_from_dir(const char* trace_dir, const vs_campaign_options* options, vs_map** out);

typedef struct vs_verify_options {
  const double* step_from; /* NULL means all zeros */
  double pre_time;         /* default 1 s */
  double hold_time;        /* default 20 s */
  double settle_guard;     /* default 0 */
  double k0_fixed;         /* default 1; 0 uses the map's k0 data */
  int allow_extrapolation; /* default 0 */
} vs_verify_options;

VS_API void vs_verify_options_default(vs_verify_options* options);

/* labels[i] names poses[i*joints ..]. */
VS_API vs_status vs_verify(const vs_plant* plant, const vs_map* map, const char* const* labels,
                           const double* poses, size_t joints, size_t count, const vs_verify_options* options,
                           vs_report** out);
VS_API void vs_report_free(vs_report* report);
VS_API size_t vs_report_rows(const vs_report* report);
VS_API vs_status vs_report_row(const vs_report* report, size_t row, double* amplitude_without,
                               double* amplitude_with, double* reduction_percent);
VS_API vs_status vs_report_write_csv(const vs_report* report, const char* path);
/* Fixed-width text table; the string lives as long as the report. */
VS_API const char* vs_report_table(const vs_report* report);
VS_API const char* vs_report_csv(const vs_report* report);

#ifdef __cplusplus
}
#endif

#endif /* VIBSHAPE_H */
