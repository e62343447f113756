/* C interface to the predictive maneuver planning library.
 *
 * All functions return pmp_status (PMP_OK on success); the message for the
 * most recent failure on the calling thread is available from
 * pmp_last_error(). Handles are opaque and must be released with the
 * matching *_free function.
 */
#ifndef PMP_CAPI_H
#define PMP_CAPI_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pmp_status {
    PMP_OK = 0,
    PMP_ERR_USAGE = 1,
    PMP_ERR_CONFIG = 2,
    PMP_ERR_IO = 3,
    PMP_ERR_SCHEMA = 4,
    PMP_ERR_TRACK = 5,
    PMP_ERR_LOOKUP = 6,
    PMP_ERR_BOUNDARY = 7,
    PMP_ERR_DATA = 8,
    PMP_ERR_SHAPE = 9,
    PMP_ERR_DOMAIN = 10,
    PMP_ERR_DEPENDENCY = 11,
    PMP_ERR_PROTOCOL = 12,
    PMP_ERR_INTERNAL = 13
} pmp_status;

typedef struct pmp_config pmp_config;
typedef struct pmp_dataset pmp_dataset;

const char* pmp_version(void);
const char* pmp_status_name(pmp_status status);

/* thread-local message for the last failing call; never NULL */
const char* pmp_last_error(void);

/* ---- configuration ------------------------------------------------------ */

pmp_config* pmp_config_new(void);
void pmp_config_free(pmp_config* cfg);
pmp_status pmp_config_load_file(pmp_config* cfg, const char* path);
pmp_status pmp_config_set(pmp_config* cfg, const char* key, const char* value);
/* copies the effective value into buf (NUL-terminated, truncated if needed) */
pmp_status pmp_config_get(const pmp_config* cfg, const char* key, char* buf, size_t buflen);
uint64_t pmp_config_hash(const pmp_config* cfg);

/* ---- datasets ------------------------------------------------------------ */

pmp_status pmp_dataset_open_csv(const pmp_config* cfg, const char* path, pmp_dataset** out);
pmp_status pmp_dataset_synth(const pmp_config* cfg, pmp_dataset** out);
void pmp_dataset_free(pmp_dataset* ds);
int pmp_dataset_vehicle_count(const pmp_dataset* ds);
int pmp_dataset_frame_count(const pmp_dataset* ds);
pmp_status pmp_dataset_write_csv(const pmp_dataset* ds, const char* path);
pmp_status pmp_dataset_label_stats_csv(const pmp_dataset* ds, const char* path);

/* ---- small numeric surface ------------------------------------------------ */

/* future-cell occupancy probability for a time index in [0, 30] */
pmp_status pmp_occupancy_probability(int t, double* out);

/* ---- pipeline commands ----------------------------------------------------
 * Commands: synth, ingest, label-stats, train-mnn, train-imitation,
 * train-drl, evaluate, replay-render. Artifacts are written under the
 * configured output directory and listed in its manifest.csv.
 */
pmp_status pmp_run_command(const pmp_config* cfg, const char* command);

#ifdef __cplusplus
}
#endif

#endif /* PMP_CAPI_H */
