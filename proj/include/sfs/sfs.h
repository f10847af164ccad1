/*
   Copyright 2026 The sfs Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/


/* C interface to the superfluorescence simulator.
 *
 * All functions return an sfs_status. On failure, sfs_last_error() holds a
 * message for the calling thread until its next call into the library.
 * Handles are opaque and must be released with the matching _free call. */

#ifndef SFS_SFS_H
#define SFS_SFS_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SFS_BUILDING_LIBRARY)
#    define SFS_API __declspec(dllexport)
#  else
#    define SFS_API __declspec(dllimport)
#  endif
#else
#  define SFS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sfs_status {
    SFS_OK = 0,
    SFS_ERR_PARSE = 1,
    SFS_ERR_VALIDATION = 2,
    SFS_ERR_DIVERGENCE_CAP = 3,
    SFS_ERR_ORACLE_INAPPLICABLE = 4,
    SFS_ERR_IO = 5,
    SFS_ERR_ARGUMENT = 6,
    SFS_ERR_INTERNAL = 7
} sfs_status;

typedef enum sfs_gauge {
    SFS_GAUGE_KEEP = -1,
    SFS_GAUGE_ADAPTIVE = 0,
    SFS_GAUGE_ON = 1,
    SFS_GAUGE_OFF = 2
} sfs_gauge;

typedef enum sfs_weight {
    SFS_WEIGHT_KEEP = -1,
    SFS_WEIGHT_ON = 0,
    SFS_WEIGHT_OFF = 1
} sfs_weight;

typedef enum sfs_oracle_kind {
    SFS_ORACLE_NONE = 0,
    SFS_ORACLE_BRUTE_FORCE = 1,
    SFS_ORACLE_DICKE_LADDER = 2
} sfs_oracle_kind;

typedef struct sfs_scenario sfs_scenario;
typedef struct sfs_table sfs_table;

/* Overrides applied on top of a loaded scenario. */
typedef struct sfs_run_options {
    long long trajectories;  /* < 0 keeps the configured count */
    int override_seed;       /* nonzero: use `seed` */
    uint64_t seed;
    int gauge;               /* sfs_gauge */
    int weight;              /* sfs_weight */
    int threads;             /* 0: SFS_THREADS or hardware count */
    int normalize_intensity; /* nonzero: add I_norm */
} sfs_run_options;

SFS_API void sfs_run_options_init(sfs_run_options* opt);

SFS_API const char* sfs_version(void);
SFS_API const char* sfs_last_error(void);
SFS_API const char* sfs_status_name(sfs_status s);

SFS_API sfs_status sfs_scenario_load(const char* path, sfs_scenario** out);
SFS_API sfs_status sfs_scenario_parse(const char* text, sfs_scenario** out);
SFS_API void sfs_scenario_free(sfs_scenario* s);
/* Applies overrides in place and revalidates. */
SFS_API sfs_status sfs_scenario_apply(sfs_scenario* s, const sfs_run_options* opt);
/* Writes 16 hex digits and a terminating NUL into buf (at least 17 bytes). */
SFS_API sfs_status sfs_scenario_hash(const sfs_scenario* s, char* buf, size_t size);
SFS_API sfs_status sfs_scenario_seed(const sfs_scenario* s, uint64_t* seed);
SFS_API sfs_status sfs_scenario_trajectories(const sfs_scenario* s, long long* n);

/* Stochastic ensemble. */
SFS_API sfs_status sfs_run_ensemble(const sfs_scenario* s, const sfs_run_options* opt,
                                    sfs_table** out);
/* Exact reference (brute force or Dicke ladder). */
SFS_API sfs_status sfs_run_oracle(const sfs_scenario* s, const sfs_run_options* opt,
                                  sfs_table** out, sfs_oracle_kind* kind);
/* |stochastic - exact| per observable; the oracle is checked first so an
 * inapplicable scenario fails before any trajectory runs. */
SFS_API sfs_status sfs_run_compare(const sfs_scenario* s, const sfs_run_options* opt,
                                   sfs_table** stochastic, sfs_table** exact,
                                   sfs_table** difference, sfs_oracle_kind* kind);
/* Nested ensembles over increasing trajectory counts sharing one seed
 * stream; series are named "<observable>@<count>". */
SFS_API sfs_status sfs_run_convergence(const sfs_scenario* s, const sfs_run_options* opt,
                                       const long long* counts, size_t n_counts,
                                       sfs_table** out);

SFS_API void sfs_table_free(sfs_table* t);
SFS_API sfs_status sfs_table_series_count(const sfs_table* t, size_t* n);
/* Pointer stays valid until the table is freed. */
SFS_API sfs_status sfs_table_series_name(const sfs_table* t, size_t i, const char** name);
SFS_API sfs_status sfs_table_find(const sfs_table* t, const char* name, size_t* i);
SFS_API sfs_status sfs_table_length(const sfs_table* t, size_t i, size_t* n);
SFS_API sfs_status sfs_table_value(const sfs_table* t, size_t i, size_t j, double* time,
                                   double* re, double* im, double* stderr_re);
/* Largest |Re| over the series (used for difference tables). */
SFS_API sfs_status sfs_table_max_abs(const sfs_table* t, size_t i, double* value);
/* Trajectory bookkeeping; zero for exact tables. */
SFS_API sfs_status sfs_table_counts(const sfs_table* t, long long* total,
                                    long long* completed, long long* omitted);
SFS_API sfs_status sfs_table_write_csv(const sfs_table* t, const char* path);

#ifdef __cplusplus
}
#endif

#endif /* SFS_SFS_H */
