#include "pmp/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pmp/rng.hpp"

namespace pmp {

const TrajectoryPoint& VehicleTrack::at_frame(int frame_id) const {
    int i = index_of(frame_id);
    if (i < 0)
        throw Error(ErrCode::Lookup, "vehicle " + std::to_string(vehicle_id) +
                                         " has no frame " + std::to_string(frame_id));
    return points[size_t(i)];
}

void finalize_index(FrameIndex& idx) {
    idx.frames.clear();
    std::vector<double> speeds;
    for (const auto& [vid, track] : idx.tracks) {
        for (const auto& p : track.points) {
            idx.frames[p.frame_id].emplace_back(vid, p);
            speeds.push_back(p.velocity);
        }
    }
    for (auto& [frame, entries] : idx.frames) {
        std::sort(entries.begin(), entries.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
    }
    if (!speeds.empty()) {
        std::sort(speeds.begin(), speeds.end());
        idx.speed_p75 = speeds[size_t(0.75 * double(speeds.size() - 1))];
    }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

bool parse_double(const std::string& s, double& out) {
    const std::string t = trim(s);
    if (t.empty()) return false;
    char* end = nullptr;
    out = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size()) return false;
    return std::isfinite(out);
}

bool parse_int(const std::string& s, int& out) {
    double d;
    if (!parse_double(s, d)) return false;
    if (d != std::floor(d)) return false;
    out = int(d);
    return true;
}

}  // namespace

FrameIndex ingest_csv(const std::string& path, const DatasetMeta& meta) {
    std::ifstream in(path);
    if (!in) throw Error(ErrCode::Io, "cannot open " + path);

    std::string header;
    if (!std::getline(in, header)) throw Error(ErrCode::Schema, path + ": empty file");

    const std::vector<std::string> cols = split_csv_line(header);
    const char* required[] = {"Vehicle_ID", "Frame_ID", "Local_X", "Local_Y", "Lane_ID", "v_Vel"};
    int col_idx[6];
    for (int r = 0; r < 6; ++r) {
        col_idx[r] = -1;
        for (size_t c = 0; c < cols.size(); ++c) {
            if (trim(cols[c]) == required[r]) {
                col_idx[r] = int(c);
                break;
            }
        }
        if (col_idx[r] < 0)
            throw Error(ErrCode::Schema,
                        path + ": missing required column " + std::string(required[r]));
    }

    FrameIndex idx;
    idx.meta = meta;

    std::map<int, std::vector<TrajectoryPoint>> raw;  // in file order per vehicle
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const std::vector<std::string> fields = split_csv_line(line);
        size_t max_col = 0;
        for (int r = 0; r < 6; ++r) max_col = std::max(max_col, size_t(col_idx[r]));
        if (fields.size() <= max_col) {
            ++idx.rows_dropped;
            continue;
        }
        TrajectoryPoint p;
        bool ok = parse_int(fields[size_t(col_idx[0])], p.vehicle_id) &&
                  parse_int(fields[size_t(col_idx[1])], p.frame_id) &&
                  parse_double(fields[size_t(col_idx[2])], p.local_x) &&
                  parse_double(fields[size_t(col_idx[3])], p.local_y) &&
                  parse_int(fields[size_t(col_idx[4])], p.lane_id) &&
                  parse_double(fields[size_t(col_idx[5])], p.velocity);
        ok = ok && p.velocity >= 0.0 && p.lane_id >= 1 && p.lane_id <= meta.n_lanes;
        if (!ok) {
            ++idx.rows_dropped;
            continue;
        }
        raw[p.vehicle_id].push_back(p);
    }

    for (auto& [vid, points] : raw) {
        bool gap = false;
        for (size_t i = 1; i < points.size(); ++i) {
            int step = points[i].frame_id - points[i - 1].frame_id;
            if (step <= 0)
                throw Error(ErrCode::Track,
                            "vehicle " + std::to_string(vid) + ": non-monotone frame ids (" +
                                std::to_string(points[i - 1].frame_id) + " -> " +
                                std::to_string(points[i].frame_id) + ")");
            if (step > 1) gap = true;
        }
        if (gap) {
            ++idx.tracks_dropped;
            continue;
        }
        VehicleTrack t;
        t.vehicle_id = vid;
        t.points = std::move(points);
        idx.tracks.emplace(vid, std::move(t));
    }

    finalize_index(idx);
    return idx;
}

void write_csv(const FrameIndex& idx, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrCode::Io, "cannot write " + path);
    out << "Vehicle_ID,Frame_ID,Local_X,Local_Y,Lane_ID,v_Vel\n";
    char buf[128];
    for (const auto& [vid, track] : idx.tracks) {
        for (const auto& p : track.points) {
            std::snprintf(buf, sizeof(buf), "%d,%d,%.17g,%.17g,%d,%.17g\n", p.vehicle_id,
                          p.frame_id, p.local_x, p.local_y, p.lane_id, p.velocity);
            out << buf;
        }
    }
    if (!out) throw Error(ErrCode::Io, "failed writing " + path);
}

std::vector<std::pair<int, TrajectoryPoint>> neighbors(const FrameIndex& idx, int ego_id,
                                                       int frame) {
    auto ti = idx.tracks.find(ego_id);
    if (ti == idx.tracks.end() || ti->second.index_of(frame) < 0)
        throw Error(ErrCode::Lookup, "ego vehicle " + std::to_string(ego_id) +
                                         " absent at frame " + std::to_string(frame));
    const TrajectoryPoint& ego = ti->second.at_frame(frame);
    return neighbors_of_pose(idx, frame, ego.local_y, ego.lane_id, ego_id);
}

std::vector<std::pair<int, TrajectoryPoint>> neighbors_of_pose(const FrameIndex& idx, int frame,
                                                               double local_y, int lane_id,
                                                               int exclude_id) {
    std::vector<std::pair<int, TrajectoryPoint>> out;
    auto fi = idx.frames.find(frame);
    if (fi == idx.frames.end()) return out;
    for (const auto& [vid, p] : fi->second) {
        if (vid == exclude_id) continue;
        if (std::abs(p.local_y - local_y) > kSensorRangeFt) continue;
        if (std::abs(p.lane_id - lane_id) > 1) continue;
        out.emplace_back(vid, p);
    }
    return out;
}

Lateral label_lateral(const VehicleTrack& track, int frame) {
    const int i = track.index_of(frame);
    if (i < 0 || i - kLateralWindow < 0 || i + kLateralWindow >= track.size())
        throw Error(ErrCode::Boundary, "vehicle " + std::to_string(track.vehicle_id) +
                                           ": no +-4 s context at frame " +
                                           std::to_string(frame));
    const int lane_before = track.points[size_t(i - kLateralWindow)].lane_id;
    const int lane_after = track.points[size_t(i + kLateralWindow)].lane_id;
    if (lane_before == lane_after) return Lateral::SameLane;
    const bool left = lane_after < lane_before;  // lane index decreases to the left
    const int lane_soon = track.points[size_t(i + kHardWindow)].lane_id;
    const bool hard = lane_soon != lane_before;  // already changed within 1 s
    if (left) return hard ? Lateral::HardLeft : Lateral::SoftLeft;
    return hard ? Lateral::HardRight : Lateral::SoftRight;
}

Longitudinal label_longitudinal(const VehicleTrack& track, int frame) {
    const int i = track.index_of(frame);
    if (i < 0 || i + kLongitudinalWindow >= track.size())
        throw Error(ErrCode::Boundary, "vehicle " + std::to_string(track.vehicle_id) +
                                           ": no +5 s context at frame " + std::to_string(frame));
    const double v_now = track.points[size_t(i)].velocity;
    double sum = 0.0;
    for (int k = 1; k <= kLongitudinalWindow; ++k)
        sum += track.points[size_t(i + k)].velocity;
    const double v_future = sum / double(kLongitudinalWindow);
    if (v_future < 0.8 * v_now) return Longitudinal::Brake;
    if (v_future < 0.95 * v_now) return Longitudinal::Decelerate;
    if (v_future > 1.05 * v_now) return Longitudinal::Accelerate;
    return Longitudinal::Cruise;
}

bool labelable(const VehicleTrack& track, int frame) {
    const int i = track.index_of(frame);
    return i >= kLateralWindow && i + kLongitudinalWindow < track.size();
}

double LabelStats::lateral_pct(Lateral a) const {
    return total ? 100.0 * double(lateral_counts[lateral_index(a)]) / double(total) : 0.0;
}

double LabelStats::longitudinal_pct(Longitudinal a) const {
    return total ? 100.0 * double(longitudinal_counts[longitudinal_index(a)]) / double(total)
                 : 0.0;
}

double LabelStats::same_lane_and_cruise_pct() const {
    return total ? 100.0 * double(same_lane_and_cruise) / double(total) : 0.0;
}

LabelStats label_distribution(const FrameIndex& idx) {
    LabelStats stats;
    for (const auto& [vid, track] : idx.tracks) {
        for (const auto& p : track.points) {
            if (!labelable(track, p.frame_id)) continue;
            const Lateral lat = label_lateral(track, p.frame_id);
            const Longitudinal lon = label_longitudinal(track, p.frame_id);
            ++stats.lateral_counts[lateral_index(lat)];
            ++stats.longitudinal_counts[longitudinal_index(lon)];
            if (lat == Lateral::SameLane && lon == Longitudinal::Cruise)
                ++stats.same_lane_and_cruise;
            ++stats.total;
        }
    }
    if (stats.total == 0) throw Error(ErrCode::Data, "no labelable samples in dataset");
    return stats;
}

void write_label_stats_csv(const LabelStats& stats, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrCode::Io, "cannot write " + path);
    char buf[128];
    out << "class,count,percent\n";
    for (int i = 0; i < kNumLateral; ++i) {
        std::snprintf(buf, sizeof(buf), "%s,%ld,%.4f\n", lateral_name(lateral_from_index(i)),
                      stats.lateral_counts[i], stats.lateral_pct(lateral_from_index(i)));
        out << buf;
    }
    for (int i = 0; i < kNumLongitudinal; ++i) {
        std::snprintf(buf, sizeof(buf), "%s,%ld,%.4f\n",
                      longitudinal_name(longitudinal_from_index(i)), stats.longitudinal_counts[i],
                      stats.longitudinal_pct(longitudinal_from_index(i)));
        out << buf;
    }
    std::snprintf(buf, sizeof(buf), "same_lane_and_cruise,%ld,%.4f\n", stats.same_lane_and_cruise,
                  stats.same_lane_and_cruise_pct());
    out << buf;
    std::snprintf(buf, sizeof(buf), "total,%ld,100.0000\n", stats.total);
    out << buf;
}

FrameIndex synth_generate(const SynthConfig& cfg) {
    if (cfg.vehicles <= 0) throw Error(ErrCode::Config, "synth.vehicles must be positive");
    if (cfg.frames < 2) throw Error(ErrCode::Config, "synth.frames must be at least 2");
    if (cfg.n_lanes < 1) throw Error(ErrCode::Config, "synth.n_lanes must be at least 1");
    if (cfg.n_lanes < 2 && cfg.lane_change_rate > 0.0)
        throw Error(ErrCode::Config, "lane changes require at least 2 lanes");

    Rng rng(cfg.seed);
    const int n = cfg.vehicles;
    const int n_lane_change = int(std::llround(cfg.lane_change_rate * n));
    const int n_brake = int(std::llround(cfg.brake_rate * n));

    std::vector<int> order(static_cast<size_t>(n), 0);
    for (int i = 0; i < n; ++i) order[size_t(i)] = i;
    rng.shuffle(order);

    std::vector<bool> does_lane_change(size_t(n), false), does_brake(size_t(n), false);
    int assigned = 0;
    for (int k = 0; k < n_lane_change && assigned < n; ++k)
        does_lane_change[size_t(order[size_t(assigned++)])] = true;
    for (int k = 0; k < n_brake && assigned < n; ++k)
        does_brake[size_t(order[size_t(assigned++)])] = true;

    const double dt = 0.1;
    FrameIndex idx;
    idx.meta.n_lanes = cfg.n_lanes;
    idx.meta.lane_width = cfg.lane_width;

    for (int i = 0; i < n; ++i) {
        VehicleTrack track;
        track.vehicle_id = i + 1;
        int lane = 1 + (i % cfg.n_lanes);
        const double v0 = cfg.speed_mean * (1.0 + cfg.speed_jitter * rng.uniform(-1.0, 1.0));
        double x = (lane - 0.5) * cfg.lane_width;
        double y = double(i) * cfg.spacing;
        double v = v0;

        // event frame in the middle third so labeling windows cover it
        const int event = cfg.frames / 2 + rng.uniform_int(std::max(1, cfg.frames / 8));
        const int target_lane = (lane == cfg.n_lanes) ? lane - 1 : lane + 1;
        const double x_target = (target_lane - 0.5) * cfg.lane_width;
        const int change_duration = 20;  // 2 s drift between lane centers

        for (int f = 0; f < cfg.frames; ++f) {
            if (does_brake[size_t(i)] && f >= event && f < event + 10)
                v = std::max(0.3 * v0, v - 0.07 * v0);
            if (does_lane_change[size_t(i)] && f >= event && f < event + change_duration)
                x += (x_target - x) / double(event + change_duration - f);
            lane = std::clamp(int(std::floor(x / cfg.lane_width)) + 1, 1, cfg.n_lanes);

            TrajectoryPoint p;
            p.vehicle_id = track.vehicle_id;
            p.frame_id = f + 1;
            p.local_x = x;
            p.local_y = y;
            p.lane_id = lane;
            p.velocity = v;
            track.points.push_back(p);
            y += v * dt;
        }
        idx.tracks.emplace(track.vehicle_id, std::move(track));
    }

    finalize_index(idx);
    return idx;
}

}  // namespace pmp
