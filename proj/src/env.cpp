#include "pmp/env.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace pmp {

MetaAction rule_policy_decide(const SceneView& scene, const RewardConfig& cfg) {
    const double inf = std::numeric_limits<double>::infinity();
    const double half_l = 0.5 * cfg.vehicle_length;

    auto front_gap = [&](int lane) {
        double gap = inf;
        for (const TrajectoryPoint& p : scene.neighbors) {
            if (p.lane_id != lane) continue;
            const double dy = p.local_y - scene.ego_y;
            if (dy > 0.0 && dy < gap) gap = dy;
        }
        return gap;
    };
    auto band_clear = [&](int lane) {
        for (const TrajectoryPoint& p : scene.neighbors)
            if (p.lane_id == lane && std::abs(p.local_y - scene.ego_y) <= half_l) return false;
        return true;
    };

    const double gap_ego = front_gap(scene.ego_lane);

    MetaAction a;
    if (gap_ego < cfg.d1)
        a.lon = Longitudinal::Brake;
    else if (gap_ego < cfg.d2)
        a.lon = Longitudinal::Decelerate;
    else if (gap_ego > 2.0 * cfg.d2 && scene.ego_v < scene.speed_p75)
        a.lon = Longitudinal::Accelerate;
    else
        a.lon = Longitudinal::Cruise;

    a.lat = Lateral::SameLane;
    double best_gap = 0.0;
    for (const int lane : {scene.ego_lane - 1, scene.ego_lane + 1}) {
        if (lane < 1 || lane > scene.n_lanes) continue;
        const double gap = front_gap(lane);
        if (gap > 2.0 * gap_ego && band_clear(lane) && gap > best_gap) {
            best_gap = gap;
            a.lat = (lane < scene.ego_lane) ? Lateral::SoftLeft : Lateral::SoftRight;
        }
    }
    return a;
}

SimEnv::SimEnv(const FrameIndex& idx, const MnnParams& mnn, RewardConfig reward_cfg,
               ControlTable controls)
    : idx_(&idx), mnn_(&mnn), reward_cfg_(reward_cfg), controls_(controls) {
    reward_cfg_.n_lanes = idx.meta.n_lanes;
    reward_cfg_.lane_width = idx.meta.lane_width;
}

int SimEnv::current_frame() const {
    if (!track_) throw Error(ErrCode::Protocol, "environment not reset");
    return track_->first_frame() + cursor_;
}

int SimEnv::episode_steps(int vehicle_id) const {
    auto it = idx_->tracks.find(vehicle_id);
    if (it == idx_->tracks.end())
        throw Error(ErrCode::Lookup, "no vehicle " + std::to_string(vehicle_id));
    const int n = it->second.size();
    if (n < kMinEpisodeTrack)
        throw Error(ErrCode::Boundary,
                    "vehicle " + std::to_string(vehicle_id) + " track too short for an episode (" +
                        std::to_string(n) + " < " + std::to_string(kMinEpisodeTrack) + " frames)");
    return n - kEpisodeHistoryMargin - kEpisodeFutureMargin;
}

std::vector<int> SimEnv::episode_vehicles() const {
    std::vector<int> out;
    for (const auto& [vid, track] : idx_->tracks)
        if (track.size() >= kMinEpisodeTrack) out.push_back(vid);
    return out;
}

ContextGrid SimEnv::reset(int vehicle_id) {
    episode_steps(vehicle_id);  // validates track length
    track_ = &idx_->tracks.at(vehicle_id);
    ego_id_ = vehicle_id;
    cursor_ = kEpisodeHistoryMargin;
    end_index_ = track_->size() - kEpisodeFutureMargin;
    done_ = false;
    trace_.clear();
    last_surrounding_.clear();

    const TrajectoryPoint& prev = track_->points[size_t(cursor_ - 1)];
    const TrajectoryPoint& cur = track_->points[size_t(cursor_)];
    ego_ = estimate_state(prev.local_x, prev.local_y, cur.local_x, cur.local_y, kStepSeconds);

    ego_history_.clear();
    for (int c = 0; c < GridSpec::kPast; ++c) {
        const TrajectoryPoint& p = track_->points[size_t(cursor_ - GridSpec::kPast + 1 + c)];
        ego_history_.push_back({p.local_x, p.local_y, p.lane_id});
    }
    return build_observation();
}

ContextGrid observation_from_history(const FrameIndex& idx, int ego_id, int frame_now,
                                     const std::vector<GridPose>& ego_history,
                                     const MnnParams& mnn) {
    const GridPose& ego_now = ego_history.back();

    GridInputs in;
    in.lane_width = idx.meta.lane_width;
    in.ego_history = ego_history;

    const auto near = neighbors_of_pose(idx, frame_now, ego_now.y, ego_now.lane, ego_id);
    for (const auto& [vid, point] : near) {
        NeighborInput nb;
        nb.vehicle_id = vid;
        const VehicleTrack& track = idx.tracks.at(vid);

        nb.past.resize(size_t(GridSpec::kPast));
        for (int c = 0; c < GridSpec::kPast; ++c) {
            const int frame = frame_now - (GridSpec::kPast - 1) + c;
            const int i = track.index_of(frame);
            if (i >= 0) {
                const TrajectoryPoint& p = track.points[size_t(i)];
                nb.past[size_t(c)] = GridPose{p.local_x, p.local_y, p.lane_id};
            }
        }

        std::vector<std::array<double, 2>> history;
        const int now_i = track.index_of(frame_now);
        const int from_i = std::max(0, now_i - (GridSpec::kPast - 1));
        for (int i = from_i; i <= now_i; ++i)
            history.push_back({track.points[size_t(i)].local_x, track.points[size_t(i)].local_y});
        if (history.size() < 2) history.insert(history.begin(), history.front());
        nb.prediction = mnn_rollout(mnn, history, GridSpec::kFuture);

        in.neighbors.push_back(std::move(nb));
    }
    return build_grid(in);
}

ContextGrid observation_for_recorded(const FrameIndex& idx, const VehicleTrack& track, int frame,
                                     const MnnParams& mnn) {
    const int i = track.index_of(frame);
    if (i < GridSpec::kPast - 1)
        throw Error(ErrCode::Boundary, "vehicle " + std::to_string(track.vehicle_id) +
                                           " lacks 30 frames of history at frame " +
                                           std::to_string(frame));
    std::vector<GridPose> history;
    history.reserve(size_t(GridSpec::kPast));
    for (int c = 0; c < GridSpec::kPast; ++c) {
        const TrajectoryPoint& p = track.points[size_t(i - (GridSpec::kPast - 1) + c)];
        history.push_back({p.local_x, p.local_y, p.lane_id});
    }
    return observation_from_history(idx, track.vehicle_id, frame, history, mnn);
}

ContextGrid SimEnv::build_observation() const {
    return observation_from_history(
        *idx_, ego_id_, current_frame(),
        std::vector<GridPose>(ego_history_.begin(), ego_history_.end()), *mnn_);
}

MetaAction rule_label_at(const FrameIndex& idx, const VehicleTrack& track, int frame,
                         const RewardConfig& cfg) {
    const TrajectoryPoint& rec = track.at_frame(frame);
    SceneView scene;
    scene.ego_y = rec.local_y;
    scene.ego_lane = rec.lane_id;
    scene.ego_v = rec.velocity;
    scene.speed_p75 = idx.speed_p75;
    scene.n_lanes = idx.meta.n_lanes;
    for (const auto& [vid, p] :
         neighbors_of_pose(idx, rec.frame_id, rec.local_y, rec.lane_id, track.vehicle_id))
        scene.neighbors.push_back(p);
    return rule_policy_decide(scene, cfg);
}

MetaAction SimEnv::recorded_rule_label() const {
    if (!track_) throw Error(ErrCode::Protocol, "environment not reset");
    return rule_label_at(*idx_, *track_, current_frame(), reward_cfg_);
}

std::optional<ManeuverLabel> SimEnv::recorded_human_label() const {
    if (!track_) throw Error(ErrCode::Protocol, "environment not reset");
    const int frame = current_frame();
    if (!labelable(*track_, frame)) return std::nullopt;
    return ManeuverLabel{label_lateral(*track_, frame), label_longitudinal(*track_, frame)};
}

StepResult SimEnv::step(const MetaAction& action) {
    if (!track_) throw Error(ErrCode::Protocol, "environment not reset");
    if (done_) throw Error(ErrCode::Protocol, "step after episode end");

    StepResult res;
    res.info.rule_label = recorded_rule_label();
    res.info.human_label = recorded_human_label();

    const ControlDelta u = action_to_control(action, controls_);
    ego_ = step_unicycle(ego_, u, kStepSeconds);
    ++cursor_;

    const int frame = current_frame();
    const int ego_lane = lane_of_x(ego_.x, idx_->meta.lane_width);
    ego_history_.push_back({ego_.x, ego_.y, ego_lane});
    if (int(ego_history_.size()) > GridSpec::kPast) ego_history_.pop_front();

    last_surrounding_.clear();
    for (const auto& [vid, p] : neighbors_of_pose(*idx_, frame, ego_.y, ego_lane, ego_id_))
        last_surrounding_.push_back({p.local_x, p.local_y});

    const TrajectoryPoint& actual = track_->points[size_t(cursor_)];
    res.reward = total_reward({ego_.x, ego_.y}, {actual.local_x, actual.local_y},
                              last_surrounding_, reward_cfg_);
    res.info.near_collision = res.reward.n_count > 0;

    done_ = (cursor_ >= end_index_);
    res.done = done_;
    res.observation = build_observation();

    trace_.push_back({frame, ego_, action, res.reward, res.info.near_collision});
    return res;
}

void SimEnv::write_trace_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw Error(ErrCode::Io, "cannot write " + path);
    out << "frame,ego_x,ego_y,ego_v,ego_phi,lateral,longitudinal,r_dis,r_imit,r_offroad,total,"
           "near_collision\n";
    char buf[256];
    for (const TraceRow& row : trace_) {
        std::snprintf(buf, sizeof(buf), "%d,%.6f,%.6f,%.6f,%.6f,%s,%s,%.6f,%.6f,%.6f,%.6f,%d\n",
                      row.frame, row.ego.x, row.ego.y, row.ego.v, row.ego.phi,
                      lateral_name(row.action.lat), longitudinal_name(row.action.lon),
                      row.reward.r_dis, row.reward.r_imit, row.reward.r_offroad, row.reward.total,
                      row.near_collision ? 1 : 0);
        out << buf;
    }
}

}  // namespace pmp
