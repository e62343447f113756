#pragma once

#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "pmp/dynamics.hpp"
#include "pmp/grid.hpp"
#include "pmp/mnn.hpp"
#include "pmp/reward.hpp"
#include "pmp/trajectory.hpp"

namespace pmp {

// Episode margins: 30 frames of history before the first decision, 50 frames
// of lookahead after the last one, so a track of N frames yields N - 80 steps.
constexpr int kEpisodeHistoryMargin = 30;
constexpr int kEpisodeFutureMargin = 50;
constexpr int kMinEpisodeTrack = kEpisodeHistoryMargin + kEpisodeFutureMargin + 1;

struct SceneView {
    double ego_y = 0.0;
    int ego_lane = 1;
    double ego_v = 0.0;
    std::vector<TrajectoryPoint> neighbors;
    double speed_p75 = 0.0;
    int n_lanes = 5;
};

// Deterministic gap-acceptance rules used both as the comparison policy and
// as the rule label for consensus splits and replay subsampling.
MetaAction rule_policy_decide(const SceneView& scene, const RewardConfig& cfg);

// rule decision for a recorded vehicle pose (the dataset-side rule label)
MetaAction rule_label_at(const FrameIndex& idx, const VehicleTrack& track, int frame,
                         const RewardConfig& cfg);

// Context grid around an arbitrary 30-frame ego pose history: in-range
// neighbors replayed for the past channels, MNN rollouts for the future ones.
ContextGrid observation_from_history(const FrameIndex& idx, int ego_id, int frame_now,
                                     const std::vector<GridPose>& ego_history,
                                     const MnnParams& mnn);

// Grid around a recorded vehicle at a frame (imitation training input).
ContextGrid observation_for_recorded(const FrameIndex& idx, const VehicleTrack& track, int frame,
                                     const MnnParams& mnn);

struct StepInfo {
    MetaAction rule_label;  // rule decision on the recorded scene at the decision frame
    std::optional<ManeuverLabel> human_label;  // absent while the +-4 s window is incomplete
    bool near_collision = false;               // any vehicle in the negative reward region
};

struct StepResult {
    ContextGrid observation;
    RewardBreakdown reward;
    bool done = false;
    StepInfo info;
};

// One controlled ego per recorded trajectory; every other vehicle replays the
// dataset verbatim and never reacts. Episodes end only at track end.
class SimEnv {
public:
    SimEnv(const FrameIndex& idx, const MnnParams& mnn, RewardConfig reward_cfg = {},
           ControlTable controls = {});

    ContextGrid reset(int vehicle_id);
    StepResult step(const MetaAction& action);

    bool done() const { return done_; }
    const EgoState& ego() const { return ego_; }
    int ego_vehicle() const { return ego_id_; }
    int current_frame() const;
    const FrameIndex& dataset() const { return *idx_; }
    const RewardConfig& reward_config() const { return reward_cfg_; }

    // surrounding positions used by the previous step's reward (replay check)
    const std::vector<Position>& last_surrounding() const { return last_surrounding_; }

    int episode_steps(int vehicle_id) const;
    std::vector<int> episode_vehicles() const;

    // rule decision and human label on the recorded scene at the current frame
    MetaAction recorded_rule_label() const;
    std::optional<ManeuverLabel> recorded_human_label() const;

    struct TraceRow {
        int frame = 0;
        EgoState ego;
        MetaAction action;
        RewardBreakdown reward;
        bool near_collision = false;
    };
    const std::vector<TraceRow>& trace() const { return trace_; }
    void write_trace_csv(const std::string& path) const;

private:
    ContextGrid build_observation() const;

    const FrameIndex* idx_;
    const MnnParams* mnn_;
    RewardConfig reward_cfg_;
    ControlTable controls_;

    const VehicleTrack* track_ = nullptr;
    int ego_id_ = -1;
    int cursor_ = 0;      // index into the ego track
    int end_index_ = 0;   // cursor value at which the episode is done
    bool done_ = true;
    EgoState ego_;
    std::deque<GridPose> ego_history_;  // last 30 ego poses
    std::vector<Position> last_surrounding_;
    std::vector<TraceRow> trace_;
};

}  // namespace pmp
