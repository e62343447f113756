#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "pmp/env.hpp"
#include "pmp/networks.hpp"

namespace pmp {

struct ImitationSample {
    ContextGrid grid;
    ManeuverLabel label;
};

// Removes every sample the model already classifies like its label
// (argmax of both heads); first training epoch of the imitation recipe.
std::vector<ImitationSample> prune_dataset(const ImitationModel& model,
                                           const std::vector<ImitationSample>& dataset);

struct ImitationTrainConfig {
    int epochs = 30;
    int batch_size = 32;
    double learning_rate = 1e-3;
    double grad_clip = 10.0;
    int cruise_keep_every = 5;  // train on 1 in 5 cruise-labeled samples (20%)
    uint64_t seed = 1;
};

struct ImitationTrainResult {
    ImitationModel model;
    std::vector<double> epoch_loss;        // mean BCE (both heads) per epoch
    std::vector<long> epoch_samples_used;  // after cruise subsampling
    size_t pruned_away = 0;
};

// Epoch-1 pass + prune, then BCE over both heads on the remainder with
// 1-in-5 cruise retention.
ImitationTrainResult train_imitation(const std::vector<ImitationSample>& dataset,
                                     const ImitationTrainConfig& cfg);

double imitation_accuracy(const ImitationModel& model,
                          const std::vector<ImitationSample>& dataset);

// ---- replay and DDQN ----------------------------------------------------------

struct Transition {
    std::vector<double> state;       // encoded observation
    MetaAction action;
    double reward = 0.0;
    std::vector<double> next_state;  // encoded next observation
    bool terminal = false;
};

// Ring buffer with FIFO eviction. Cruise-labeled transitions are stored on
// counter parity (1 in cruise_keep_every, default 50%); everything else is
// always stored.
class ReplayBuffer {
public:
    explicit ReplayBuffer(size_t capacity, int cruise_keep_every = 2)
        : capacity_(capacity), cruise_keep_every_(cruise_keep_every) {}

    void push(Transition t, const MetaAction& rule_label);
    size_t size() const { return data_.size(); }
    size_t capacity() const { return capacity_; }
    long cruise_seen() const { return k_cruise_; }
    const Transition& at(size_t i) const { return data_[(head_ + i) % data_.size()]; }

    std::vector<const Transition*> sample(Rng& rng, int batch) const;

private:
    size_t capacity_;
    int cruise_keep_every_;
    size_t head_ = 0;  // oldest element when full
    long k_cruise_ = 0;
    std::vector<Transition> data_;
};

// Per-head target r + gamma * Q_primary(s', argmax Q_target(s', .)), the
// role assignment written in the training recipe; `conventional` swaps the
// two networks back to the textbook pairing. Terminal states bootstrap to r.
struct DdqnTargets {
    double lat = 0.0;
    double lon = 0.0;
};

DdqnTargets ddqn_target(double reward, const std::vector<double>& next_state,
                        const QNet& primary, const QNet& target, double gamma, bool terminal,
                        bool conventional = false);

struct DrlDataset {
    std::string name;
    const FrameIndex* data = nullptr;
    std::vector<int> episode_vehicles;  // empty = every long-enough track
};

struct DrlTrainConfig {
    double gamma = 0.99;
    double epsilon_start = 1.0;
    double epsilon_end = 0.05;
    int batch_size = 32;
    size_t buffer_capacity = 100000;
    int target_sync_every = 1000;  // gradient steps
    double learning_rate = 1e-4;
    double grad_clip = 10.0;
    double huber_delta = 1.0;
    int cruise_keep_every = 2;     // replay stores 1 in 2 cruise transitions
    int updates_per_step = 1;      // gradient steps per environment step
    int episodes_per_dataset = 0;  // 0 = one pass over the dataset's vehicles
    bool conventional_ddqn = false;
    uint64_t seed = 1;
    std::string checkpoint_dir;  // per-dataset checkpoints when non-empty
    std::string log_path;        // step-window CSV when non-empty
    int log_window = 500;
};

struct DrlTrainResult {
    QNetworks qnets;
    std::vector<std::string> checkpoints;
    long env_steps = 0;
    long gradient_steps = 0;
};

using EnvFactory = std::function<std::unique_ptr<SimEnv>(const DrlDataset&)>;

// Curriculum DDQN with a frozen encoder: fresh replay buffer per dataset,
// epsilon-greedy rollouts, Huber gradient steps, periodic target sync.
DrlTrainResult train_drl(const EnvFactory& make_env, const std::vector<DrlDataset>& datasets,
                         const Encoder& frozen_encoder, const DrlTrainConfig& cfg);

}  // namespace pmp
