#include "pmp_capi.h"

#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "pmp/config.hpp"
#include "pmp/grid.hpp"
#include "pmp/pipeline.hpp"
#include "pmp/trajectory.hpp"

struct pmp_config {
    pmp::RunConfig impl;
};

struct pmp_dataset {
    pmp::FrameIndex impl;
};

namespace {

thread_local std::string t_last_error = "";

pmp_status status_of(pmp::ErrCode code) {
    using pmp::ErrCode;
    switch (code) {
        case ErrCode::Usage: return PMP_ERR_USAGE;
        case ErrCode::Config: return PMP_ERR_CONFIG;
        case ErrCode::Io: return PMP_ERR_IO;
        case ErrCode::Schema: return PMP_ERR_SCHEMA;
        case ErrCode::Track: return PMP_ERR_TRACK;
        case ErrCode::Lookup: return PMP_ERR_LOOKUP;
        case ErrCode::Boundary: return PMP_ERR_BOUNDARY;
        case ErrCode::Data: return PMP_ERR_DATA;
        case ErrCode::Shape: return PMP_ERR_SHAPE;
        case ErrCode::Domain: return PMP_ERR_DOMAIN;
        case ErrCode::Dependency: return PMP_ERR_DEPENDENCY;
        case ErrCode::Protocol: return PMP_ERR_PROTOCOL;
        case ErrCode::Internal: return PMP_ERR_INTERNAL;
    }
    return PMP_ERR_INTERNAL;
}

template <typename Fn>
pmp_status guarded(Fn&& fn) {
    try {
        fn();
        t_last_error.clear();
        return PMP_OK;
    } catch (const pmp::Error& e) {
        t_last_error = e.what();
        return status_of(e.code());
    } catch (const std::exception& e) {
        t_last_error = e.what();
        return PMP_ERR_INTERNAL;
    } catch (...) {
        t_last_error = "unknown error";
        return PMP_ERR_INTERNAL;
    }
}

pmp_status fail(pmp_status status, const char* msg) {
    t_last_error = msg;
    return status;
}

pmp::DatasetMeta meta_from(const pmp_config* cfg) {
    pmp::DatasetMeta meta;
    meta.n_lanes = cfg->impl.get_int("data.n_lanes");
    meta.lane_width = cfg->impl.get_double("data.lane_width");
    meta.frame_rate = cfg->impl.get_double("data.frame_rate");
    return meta;
}

}  // namespace

extern "C" {

const char* pmp_version(void) { return "1.0.0"; }

const char* pmp_status_name(pmp_status status) {
    switch (status) {
        case PMP_OK: return "ok";
        case PMP_ERR_USAGE: return "usage error";
        case PMP_ERR_CONFIG: return "config error";
        case PMP_ERR_IO: return "io error";
        case PMP_ERR_SCHEMA: return "schema error";
        case PMP_ERR_TRACK: return "track error";
        case PMP_ERR_LOOKUP: return "lookup error";
        case PMP_ERR_BOUNDARY: return "boundary error";
        case PMP_ERR_DATA: return "data error";
        case PMP_ERR_SHAPE: return "shape error";
        case PMP_ERR_DOMAIN: return "domain error";
        case PMP_ERR_DEPENDENCY: return "dependency error";
        case PMP_ERR_PROTOCOL: return "protocol error";
        case PMP_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* pmp_last_error(void) { return t_last_error.c_str(); }

pmp_config* pmp_config_new(void) { return new (std::nothrow) pmp_config(); }

void pmp_config_free(pmp_config* cfg) { delete cfg; }

pmp_status pmp_config_load_file(pmp_config* cfg, const char* path) {
    if (!cfg || !path) return fail(PMP_ERR_USAGE, "null argument");
    return guarded([&] { cfg->impl.load_file(path); });
}

pmp_status pmp_config_set(pmp_config* cfg, const char* key, const char* value) {
    if (!cfg || !key || !value) return fail(PMP_ERR_USAGE, "null argument");
    return guarded([&] { cfg->impl.set(key, value); });
}

pmp_status pmp_config_get(const pmp_config* cfg, const char* key, char* buf, size_t buflen) {
    if (!cfg || !key || !buf || buflen == 0) return fail(PMP_ERR_USAGE, "null argument");
    return guarded([&] {
        const std::string v = cfg->impl.get_string(key);
        std::strncpy(buf, v.c_str(), buflen - 1);
        buf[buflen - 1] = '\0';
    });
}

uint64_t pmp_config_hash(const pmp_config* cfg) { return cfg ? cfg->impl.hash() : 0; }

pmp_status pmp_dataset_open_csv(const pmp_config* cfg, const char* path, pmp_dataset** out) {
    if (!cfg || !path || !out) return fail(PMP_ERR_USAGE, "null argument");
    return guarded([&] {
        auto ds = std::make_unique<pmp_dataset>();
        ds->impl = pmp::ingest_csv(path, meta_from(cfg));
        *out = ds.release();
    });
}

pmp_status pmp_dataset_synth(const pmp_config* cfg, pmp_dataset** out) {
    if (!cfg || !out) return fail(PMP_ERR_USAGE, "null argument");
    return guarded([&] {
        pmp::SynthConfig sc;
        sc.vehicles = cfg->impl.get_int("synth.vehicles");
        sc.frames = cfg->impl.get_int("synth.frames");
        sc.n_lanes = cfg->impl.get_int("data.n_lanes");
        sc.lane_width = cfg->impl.get_double("data.lane_width");
        sc.speed_mean = cfg->impl.get_double("synth.speed_mean");
        sc.speed_jitter = cfg->impl.get_double("synth.speed_jitter");
        sc.lane_change_rate = cfg->impl.get_double("synth.lane_change_rate");
        sc.brake_rate = cfg->impl.get_double("synth.brake_rate");
        sc.spacing = cfg->impl.get_double("synth.spacing");
        sc.seed = uint64_t(cfg->impl.get_long("seed"));
        auto ds = std::make_unique<pmp_dataset>();
        ds->impl = pmp::synth_generate(sc);
        *out = ds.release();
    });
}

void pmp_dataset_free(pmp_dataset* ds) { delete ds; }

int pmp_dataset_vehicle_count(const pmp_dataset* ds) {
    return ds ? ds->impl.vehicle_count() : 0;
}

int pmp_dataset_frame_count(const pmp_dataset* ds) { return ds ? ds->impl.frame_count() : 0; }

pmp_status pmp_dataset_write_csv(const pmp_dataset* ds, const char* path) {
    if (!ds || !path) return fail(PMP_ERR_USAGE, "null argument");
    return guarded([&] { pmp::write_csv(ds->impl, path); });
}

pmp_status pmp_dataset_label_stats_csv(const pmp_dataset* ds, const char* path) {
    if (!ds || !path) return fail(PMP_ERR_USAGE, "null argument");
    return guarded([&] {
        const pmp::LabelStats stats = pmp::label_distribution(ds->impl);
        pmp::write_label_stats_csv(stats, path);
    });
}

pmp_status pmp_occupancy_probability(int t, double* out) {
    if (!out) return fail(PMP_ERR_USAGE, "null argument");
    return guarded([&] { *out = pmp::occupancy_probability(t); });
}

pmp_status pmp_run_command(const pmp_config* cfg, const char* command) {
    if (!cfg || !command) return fail(PMP_ERR_USAGE, "null argument");
    return guarded([&] { pmp::run_command(command, cfg->impl); });
}

}  // extern "C"
