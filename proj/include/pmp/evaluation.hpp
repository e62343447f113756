#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "pmp/env.hpp"
#include "pmp/networks.hpp"
#include "pmp/rng.hpp"

namespace pmp {

constexpr double kFeetToMeters = 0.3048;

// true at step t (t >= 1) when either axis jumps by more than one smooth
// ordinal step; size of the result is one less than the action count
std::vector<bool> jerk_flags(const std::vector<MetaAction>& actions);

// negative reward-region membership of any surrounding vehicle relative to
// the projected ego position; shares the region predicate with the reward
bool near_collision_flag(const Position& ego_projected, const std::vector<Position>& surrounding,
                         const RewardConfig& cfg);

// mean of (v_{t+1} - v_t)/dt over an episode velocity sequence, in m/s^2
struct AccelStats {
    double signed_mean = 0.0;
    double abs_mean = 0.0;
    double positive_mean = 0.0;  // mean of max(0, a)
};

AccelStats average_acceleration(const std::vector<double>& velocities_ftps, double dt);

enum class Split { Consensus, Conflict, All };

const char* split_name(Split s);

struct LabeledSample {
    ManeuverLabel human;
    MetaAction rule;
};

// consensus iff both axes agree
bool is_consensus(const LabeledSample& s);

struct ConsensusPartition {
    std::vector<size_t> consensus;
    std::vector<size_t> conflict;
};

ConsensusPartition consensus_split(const std::vector<LabeledSample>& samples);

struct MetricsReport {
    std::string policy;
    std::string dataset;
    Split split = Split::All;
    double avg_accel_mps2 = 0.0;
    double avg_abs_accel_mps2 = 0.0;
    double avg_pos_accel_mps2 = 0.0;
    double uncomfortable_pct = 0.0;
    double near_collision_pct = 0.0;
    long steps = 0;
};

struct EpisodeMetrics {
    int vehicle_id = 0;
    long steps = 0;
    double mean_accel_mps2 = 0.0;
    double uncomfortable_pct = 0.0;
    double near_collision_pct = 0.0;
};

// A driving policy decides from the grid observation and/or the recorded
// scene; the rng supports stochastic baselines.
struct PolicyContext {
    const ContextGrid* observation = nullptr;
    const SimEnv* env = nullptr;
    Rng* rng = nullptr;
};

using Policy = std::function<MetaAction(const PolicyContext&)>;

Policy make_rule_policy();
Policy make_random_policy();
Policy make_imitation_policy(std::shared_ptr<const ImitationModel> model);
Policy make_drl_policy(std::shared_ptr<const Encoder> encoder, std::shared_ptr<const QNet> qnet);

struct EvalResult {
    std::vector<MetricsReport> reports;  // one row per split
    std::vector<EpisodeMetrics> episodes;
};

// Rolls every labelable episode, accumulating the three metrics per
// consensus/conflict/all split. Steps without a full human label only count
// toward "all".
EvalResult evaluate_policy(const std::string& policy_name, const Policy& policy,
                           const std::string& dataset_name, const FrameIndex& idx,
                           const MnnParams& mnn, const RewardConfig& reward_cfg,
                           const ControlTable& controls, uint64_t seed, int workers = 1);

// Same metrics over the recorded human trajectories themselves (the dataset
// baseline): actions are the human labels, positions come from the data.
EvalResult evaluate_recorded(const std::string& dataset_name, const FrameIndex& idx,
                             const RewardConfig& reward_cfg);

void write_reports_csv(const std::vector<MetricsReport>& reports, const std::string& path);
void write_episode_metrics_csv(const std::vector<EpisodeMetrics>& episodes,
                               const std::string& path);

}  // namespace pmp
