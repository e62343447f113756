#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pmp/actions.hpp"
#include "pmp/error.hpp"

namespace pmp {

// All geometry is in feet. local_x grows to the right across lanes,
// local_y along the direction of travel. Frames are 10 Hz.
struct TrajectoryPoint {
    int vehicle_id = 0;
    int frame_id = 0;
    double local_x = 0.0;
    double local_y = 0.0;
    int lane_id = 1;
    double velocity = 0.0;  // ft/s

    bool operator==(const TrajectoryPoint&) const = default;
};

struct VehicleTrack {
    int vehicle_id = 0;
    std::vector<TrajectoryPoint> points;  // contiguous frame_ids

    int first_frame() const { return points.front().frame_id; }
    int last_frame() const { return points.back().frame_id; }
    int size() const { return int(points.size()); }

    // index of a frame within the track, or -1
    int index_of(int frame_id) const {
        if (points.empty()) return -1;
        int i = frame_id - first_frame();
        return (i >= 0 && i < size()) ? i : -1;
    }
    const TrajectoryPoint& at_frame(int frame_id) const;

    bool operator==(const VehicleTrack&) const = default;
};

struct DatasetMeta {
    int n_lanes = 5;
    double lane_width = 12.0;  // ft
    double frame_rate = 10.0;  // Hz

    bool operator==(const DatasetMeta&) const = default;
};

// Immutable after ingestion; safe for concurrent reads.
struct FrameIndex {
    DatasetMeta meta;
    std::map<int, VehicleTrack> tracks;
    // frame_id -> (vehicle_id, point), sorted by vehicle id
    std::map<int, std::vector<std::pair<int, TrajectoryPoint>>> frames;

    int rows_dropped = 0;    // rows with missing/NaN/invalid fields
    int tracks_dropped = 0;  // tracks rejected for frame gaps
    double speed_p75 = 0.0;  // fleet 75th-percentile speed, ft/s

    int vehicle_count() const { return int(tracks.size()); }
    int frame_count() const { return int(frames.size()); }

    bool same_contents(const FrameIndex& o) const {
        return meta == o.meta && tracks == o.tracks && frames == o.frames;
    }
};

// Rebuilds frames/derived stats from tracks; used by ingestion and the
// synthetic generator so both views always agree.
void finalize_index(FrameIndex& idx);

// CSV must carry at least Vehicle_ID, Frame_ID, Local_X, Local_Y, Lane_ID,
// v_Vel; other columns are ignored. Rows with missing or NaN fields are
// dropped and counted; tracks with frame gaps are rejected whole.
FrameIndex ingest_csv(const std::string& path, const DatasetMeta& meta);
void write_csv(const FrameIndex& idx, const std::string& path);

constexpr double kSensorRangeFt = 90.0;

// All vehicles v != ego with |dy| <= 90 ft and |lane difference| <= 1.
std::vector<std::pair<int, TrajectoryPoint>> neighbors(const FrameIndex& idx, int ego_id,
                                                       int frame);

// Same predicate for an arbitrary query pose (used once the ego has diverged
// from its recorded track).
std::vector<std::pair<int, TrajectoryPoint>> neighbors_of_pose(const FrameIndex& idx, int frame,
                                                               double local_y, int lane_id,
                                                               int exclude_id);

// Maneuver labeling rules. Lateral compares lane ids 4 s back and 4 s ahead;
// a change already visible 1 s ahead counts as hard. Longitudinal compares
// mean speed over the next 5 s against the current speed
// (brake < 0.8x, decelerate < 0.95x, accelerate > 1.05x, else cruise).
Lateral label_lateral(const VehicleTrack& track, int frame);
Longitudinal label_longitudinal(const VehicleTrack& track, int frame);

constexpr int kLateralWindow = 40;   // frames (4 s at 10 Hz)
constexpr int kHardWindow = 10;      // frames (1 s)
constexpr int kLongitudinalWindow = 50;  // frames (5 s)

// frame has full +-4 s / +5 s context within the track
bool labelable(const VehicleTrack& track, int frame);

struct LabelStats {
    long lateral_counts[kNumLateral] = {0, 0, 0, 0, 0};
    long longitudinal_counts[kNumLongitudinal] = {0, 0, 0, 0};
    long same_lane_and_cruise = 0;
    long total = 0;

    double lateral_pct(Lateral a) const;
    double longitudinal_pct(Longitudinal a) const;
    double same_lane_and_cruise_pct() const;
};

// Per-class percentages over all labelable (vehicle, frame) samples.
LabelStats label_distribution(const FrameIndex& idx);
void write_label_stats_csv(const LabelStats& stats, const std::string& path);

struct SynthConfig {
    int vehicles = 10;
    int frames = 200;
    int n_lanes = 5;
    double lane_width = 12.0;
    double speed_mean = 15.0;   // ft/s
    double speed_jitter = 0.0;  // +- fraction of speed_mean per vehicle
    double lane_change_rate = 0.0;
    double brake_rate = 0.0;
    double spacing = 120.0;  // longitudinal stagger between vehicles, ft
    uint64_t seed = 1;
};

// Deterministic scripted stand-in for recorded traffic: lane-keeps plus
// lane-change and braking events at the configured rates.
FrameIndex synth_generate(const SynthConfig& cfg);

}  // namespace pmp
