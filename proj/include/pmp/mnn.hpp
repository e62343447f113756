#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pmp/error.hpp"
#include "pmp/trajectory.hpp"

namespace pmp {

// Recurrent predictor of per-frame position increments. Each hidden unit j is
// paired with a memory neuron m_j(t) = alpha_j * z_j(t-1) + (1-alpha_j) * m_j(t-1)
// whose trace feeds the output layer alongside the instantaneous activation.
struct MnnParams {
    int hidden = 24;
    std::vector<double> w_in;      // hidden x 2
    std::vector<double> b_hidden;  // hidden
    std::vector<double> alpha_raw; // hidden; alpha_j = sigmoid(alpha_raw_j) in (0,1)
    std::vector<double> w_out;     // 2 x hidden
    std::vector<double> w_mem;     // 2 x hidden
    std::vector<double> b_out;     // 2

    double alpha(int j) const;
    std::size_t param_count() const;
    // flat view in a fixed order (w_in, b_hidden, alpha_raw, w_out, w_mem, b_out)
    std::vector<double*> param_ptrs();
};

MnnParams mnn_init(int hidden, uint64_t seed);

struct MnnState {
    std::vector<double> memory;   // m(t)
    std::vector<double> prev_act; // z(t-1)
};

MnnState mnn_initial_state(const MnnParams& params);

// One recurrent step: consumes a position increment, returns the predicted
// next increment and the advanced state.
std::pair<std::array<double, 2>, MnnState> mnn_forward(const MnnParams& params,
                                                       const MnnState& state,
                                                       const std::array<double, 2>& increment);

struct PredictionResult {
    std::vector<std::array<double, 2>> positions;  // (x, y) for horizons 1..T
    int horizon() const { return int(positions.size()); }
};

// Warm up on the p-1 observed increments, then roll the loop closed for T
// steps, accumulating predicted increments onto the last observed position.
PredictionResult mnn_rollout(const MnnParams& params,
                             const std::vector<std::array<double, 2>>& history, int horizon);

struct MnnTrainConfig {
    int hidden = 24;
    int epochs = 50;
    double learning_rate = 0.01;
    int min_track_len = 3;  // need at least two increments for one target
    uint64_t seed = 1;
};

struct MnnTrainResult {
    MnnParams params;
    std::vector<double> epoch_rmse;  // one-step RMSE after each epoch
};

// One-step-ahead RMSE on increments with teacher forcing, full-batch Adam.
MnnTrainResult mnn_train(const FrameIndex& dataset, const MnnTrainConfig& cfg);

// Training internals exposed for gradient verification: RMSE over the pooled
// one-step errors of all sequences, and its analytic gradient (same order as
// param_ptrs).
double mnn_loss(const MnnParams& params,
                const std::vector<std::vector<std::array<double, 2>>>& increment_seqs);
double mnn_loss_grad(const MnnParams& params,
                     const std::vector<std::vector<std::array<double, 2>>>& increment_seqs,
                     std::vector<double>& grad_out);

void mnn_save(const MnnParams& params, const std::string& path);
MnnParams mnn_load(const std::string& path);

}  // namespace pmp
