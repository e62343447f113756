#include "pmp/mnn.hpp"

#include <cmath>
#include <cstring>

#include "pmp/checkpoint.hpp"
#include "pmp/rng.hpp"

namespace pmp {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void check_dims(const MnnParams& p) {
    const size_t h = size_t(p.hidden);
    if (p.w_in.size() != h * 2 || p.b_hidden.size() != h || p.alpha_raw.size() != h ||
        p.w_out.size() != 2 * h || p.w_mem.size() != 2 * h || p.b_out.size() != 2)
        throw Error(ErrCode::Shape, "mnn parameter sizes do not match hidden width");
}

}  // namespace

double MnnParams::alpha(int j) const { return sigmoid(alpha_raw[size_t(j)]); }

std::size_t MnnParams::param_count() const {
    return w_in.size() + b_hidden.size() + alpha_raw.size() + w_out.size() + w_mem.size() +
           b_out.size();
}

std::vector<double*> MnnParams::param_ptrs() {
    std::vector<double*> out;
    out.reserve(param_count());
    for (auto* vec : {&w_in, &b_hidden, &alpha_raw, &w_out, &w_mem, &b_out})
        for (double& x : *vec) out.push_back(&x);
    return out;
}

MnnParams mnn_init(int hidden, uint64_t seed) {
    if (hidden < 1) throw Error(ErrCode::Config, "mnn hidden width must be positive");
    Rng rng(seed);
    MnnParams p;
    p.hidden = hidden;
    const size_t h = size_t(hidden);
    auto fill = [&](std::vector<double>& v, size_t n, double scale) {
        v.resize(n);
        for (double& x : v) x = rng.uniform(-scale, scale);
    };
    fill(p.w_in, h * 2, 1.0 / std::sqrt(2.0));
    fill(p.b_hidden, h, 0.0);
    p.alpha_raw.assign(h, 0.0);  // alpha = 0.5
    fill(p.w_out, 2 * h, 1.0 / std::sqrt(double(2 * h)));
    fill(p.w_mem, 2 * h, 1.0 / std::sqrt(double(2 * h)));
    p.b_out.assign(2, 0.0);
    return p;
}

MnnState mnn_initial_state(const MnnParams& params) {
    MnnState s;
    s.memory.assign(size_t(params.hidden), 0.0);
    s.prev_act.assign(size_t(params.hidden), 0.0);
    return s;
}

std::pair<std::array<double, 2>, MnnState> mnn_forward(const MnnParams& params,
                                                       const MnnState& state,
                                                       const std::array<double, 2>& increment) {
    check_dims(params);
    const size_t h = size_t(params.hidden);
    if (state.memory.size() != h || state.prev_act.size() != h)
        throw Error(ErrCode::Shape, "mnn state size does not match hidden width");

    MnnState next;
    next.memory.resize(h);
    next.prev_act.resize(h);
    std::array<double, 2> out = {params.b_out[0], params.b_out[1]};
    for (size_t j = 0; j < h; ++j) {
        const double a = sigmoid(params.alpha_raw[j]);
        const double m = a * state.prev_act[j] + (1.0 - a) * state.memory[j];
        const double z =
            std::tanh(params.w_in[j * 2] * increment[0] + params.w_in[j * 2 + 1] * increment[1] +
                      params.b_hidden[j]);
        next.memory[j] = m;
        next.prev_act[j] = z;
        out[0] += params.w_out[j] * z + params.w_mem[j] * m;
        out[1] += params.w_out[h + j] * z + params.w_mem[h + j] * m;
    }
    return {out, std::move(next)};
}

PredictionResult mnn_rollout(const MnnParams& params,
                             const std::vector<std::array<double, 2>>& history, int horizon) {
    if (history.size() < 2)
        throw Error(ErrCode::Boundary, "mnn rollout needs at least 2 history positions");
    if (horizon < 1) throw Error(ErrCode::Domain, "mnn rollout horizon must be at least 1");

    MnnState state = mnn_initial_state(params);
    std::array<double, 2> predicted = {0.0, 0.0};
    for (size_t i = 1; i < history.size(); ++i) {
        const std::array<double, 2> inc = {history[i][0] - history[i - 1][0],
                                           history[i][1] - history[i - 1][1]};
        std::tie(predicted, state) = mnn_forward(params, state, inc);
    }

    PredictionResult result;
    result.positions.reserve(size_t(horizon));
    std::array<double, 2> pos = history.back();
    for (int k = 0; k < horizon; ++k) {
        if (k > 0) std::tie(predicted, state) = mnn_forward(params, state, predicted);
        pos = {pos[0] + predicted[0], pos[1] + predicted[1]};
        result.positions.push_back(pos);
    }
    return result;
}

namespace {

// Forward over one teacher-forced sequence, recording activations for BPTT.
struct SeqTrace {
    std::vector<std::array<double, 2>> inputs;   // u_t
    std::vector<std::array<double, 2>> errors;   // y_t - target_t
    std::vector<std::vector<double>> act;        // z_t per step
    std::vector<std::vector<double>> mem;        // m_t per step
};

// Accumulates squared error; targets are the next increments.
void run_sequence(const MnnParams& p, const std::vector<std::array<double, 2>>& increments,
                  SeqTrace* trace, double& sq_sum, long& count) {
    const size_t h = size_t(p.hidden);
    MnnState state = mnn_initial_state(p);
    for (size_t t = 0; t + 1 < increments.size(); ++t) {
        auto [y, next] = mnn_forward(p, state, increments[t]);
        const std::array<double, 2> e = {y[0] - increments[t + 1][0],
                                         y[1] - increments[t + 1][1]};
        sq_sum += e[0] * e[0] + e[1] * e[1];
        count += 2;
        if (trace) {
            trace->inputs.push_back(increments[t]);
            trace->errors.push_back(e);
            trace->act.push_back(next.prev_act);
            trace->mem.push_back(next.memory);
        }
        state = std::move(next);
    }
    (void)h;
}

}  // namespace

double mnn_loss(const MnnParams& params,
                const std::vector<std::vector<std::array<double, 2>>>& increment_seqs) {
    check_dims(params);
    double sq_sum = 0.0;
    long count = 0;
    for (const auto& seq : increment_seqs) run_sequence(params, seq, nullptr, sq_sum, count);
    if (count == 0) throw Error(ErrCode::Data, "no one-step targets in training set");
    return std::sqrt(sq_sum / double(count));
}

double mnn_loss_grad(const MnnParams& params,
                     const std::vector<std::vector<std::array<double, 2>>>& increment_seqs,
                     std::vector<double>& grad_out) {
    check_dims(params);
    const size_t h = size_t(params.hidden);

    std::vector<SeqTrace> traces;
    double sq_sum = 0.0;
    long count = 0;
    for (const auto& seq : increment_seqs) {
        traces.emplace_back();
        run_sequence(params, seq, &traces.back(), sq_sum, count);
    }
    if (count == 0) throw Error(ErrCode::Data, "no one-step targets in training set");
    const double rmse = std::sqrt(sq_sum / double(count));

    MnnParams grads;
    grads.hidden = params.hidden;
    grads.w_in.assign(h * 2, 0.0);
    grads.b_hidden.assign(h, 0.0);
    grads.alpha_raw.assign(h, 0.0);
    grads.w_out.assign(2 * h, 0.0);
    grads.w_mem.assign(2 * h, 0.0);
    grads.b_out.assign(2, 0.0);

    // dRMSE/dy = e / (count * rmse)
    const double scale = (rmse > 0.0) ? 1.0 / (double(count) * rmse) : 0.0;

    const std::vector<double> zeros(h, 0.0);
    for (const SeqTrace& tr : traces) {
        const int steps = int(tr.inputs.size());
        std::vector<double> g_mem_next(h, 0.0);  // dL/dm_{t+1}
        for (int t = steps - 1; t >= 0; --t) {
            const std::array<double, 2> gy = {tr.errors[size_t(t)][0] * scale,
                                              tr.errors[size_t(t)][1] * scale};
            grads.b_out[0] += gy[0];
            grads.b_out[1] += gy[1];
            const std::vector<double>& z = tr.act[size_t(t)];
            const std::vector<double>& m = tr.mem[size_t(t)];
            const std::vector<double>& z_prev = (t > 0) ? tr.act[size_t(t - 1)] : zeros;
            const std::vector<double>& m_prev = (t > 0) ? tr.mem[size_t(t - 1)] : zeros;
            for (size_t j = 0; j < h; ++j) {
                const double a = sigmoid(params.alpha_raw[j]);
                grads.w_out[j] += gy[0] * z[j];
                grads.w_out[h + j] += gy[1] * z[j];
                grads.w_mem[j] += gy[0] * m[j];
                grads.w_mem[h + j] += gy[1] * m[j];
                // z_j feeds y_t directly and m_{t+1} via alpha
                const double gz = params.w_out[j] * gy[0] + params.w_out[h + j] * gy[1] +
                                  a * g_mem_next[j];
                // m_j feeds y_t directly and m_{t+1} via (1 - alpha)
                const double gm = params.w_mem[j] * gy[0] + params.w_mem[h + j] * gy[1] +
                                  (1.0 - a) * g_mem_next[j];
                grads.alpha_raw[j] += gm * (z_prev[j] - m_prev[j]) * a * (1.0 - a);
                const double gh = gz * (1.0 - z[j] * z[j]);
                grads.w_in[j * 2] += gh * tr.inputs[size_t(t)][0];
                grads.w_in[j * 2 + 1] += gh * tr.inputs[size_t(t)][1];
                grads.b_hidden[j] += gh;
                g_mem_next[j] = gm;
            }
        }
    }

    grad_out.clear();
    grad_out.reserve(grads.param_count());
    for (double* ptr : grads.param_ptrs()) grad_out.push_back(*ptr);
    return rmse;
}

namespace {

std::vector<std::vector<std::array<double, 2>>> increments_of(const FrameIndex& dataset,
                                                              int min_track_len) {
    std::vector<std::vector<std::array<double, 2>>> seqs;
    for (const auto& [vid, track] : dataset.tracks) {
        if (track.size() < min_track_len) continue;
        std::vector<std::array<double, 2>> inc;
        inc.reserve(size_t(track.size() - 1));
        for (size_t i = 1; i < track.points.size(); ++i)
            inc.push_back({track.points[i].local_x - track.points[i - 1].local_x,
                           track.points[i].local_y - track.points[i - 1].local_y});
        seqs.push_back(std::move(inc));
    }
    return seqs;
}

}  // namespace

MnnTrainResult mnn_train(const FrameIndex& dataset, const MnnTrainConfig& cfg) {
    const auto seqs = increments_of(dataset, std::max(cfg.min_track_len, 3));
    if (seqs.empty()) throw Error(ErrCode::Data, "no tracks long enough for mnn training");

    MnnTrainResult result;
    result.params = mnn_init(cfg.hidden, cfg.seed);
    MnnParams& p = result.params;

    // Adam over the flat parameter vector
    std::vector<double*> ptrs = p.param_ptrs();
    const size_t n = ptrs.size();
    std::vector<double> m(n, 0.0), v(n, 0.0), g;
    const double b1 = 0.9, b2 = 0.999, eps = 1e-8;

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        mnn_loss_grad(p, seqs, g);
        for (size_t i = 0; i < n; ++i) {
            m[i] = b1 * m[i] + (1.0 - b1) * g[i];
            v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
            const double mh = m[i] / (1.0 - std::pow(b1, epoch));
            const double vh = v[i] / (1.0 - std::pow(b2, epoch));
            *ptrs[i] -= cfg.learning_rate * mh / (std::sqrt(vh) + eps);
        }
        result.epoch_rmse.push_back(mnn_loss(p, seqs));
    }
    return result;
}

void mnn_save(const MnnParams& params, const std::string& path) {
    CheckpointWriter w(path, CheckpointKind::Mnn);
    w.add("w_in", {params.hidden, 2}, params.w_in);
    w.add("b_hidden", {params.hidden}, params.b_hidden);
    w.add("alpha_raw", {params.hidden}, params.alpha_raw);
    w.add("w_out", {2, params.hidden}, params.w_out);
    w.add("w_mem", {2, params.hidden}, params.w_mem);
    w.add("b_out", {2}, params.b_out);
    w.finish();
}

MnnParams mnn_load(const std::string& path) {
    CheckpointReader r(path, CheckpointKind::Mnn);
    MnnParams p;
    std::vector<int> shape;
    p.w_in = r.next("w_in", shape);
    p.hidden = shape.at(0);
    p.b_hidden = r.next("b_hidden", shape);
    p.alpha_raw = r.next("alpha_raw", shape);
    p.w_out = r.next("w_out", shape);
    p.w_mem = r.next("w_mem", shape);
    p.b_out = r.next("b_out", shape);
    r.finish();
    check_dims(p);
    return p;
}

}  // namespace pmp
