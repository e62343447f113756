#include "pmp/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace pmp {

std::vector<ImitationSample> prune_dataset(const ImitationModel& model,
                                           const std::vector<ImitationSample>& dataset) {
    if (dataset.empty()) throw Error(ErrCode::Data, "empty imitation dataset");
    std::vector<ImitationSample> kept;
    for (const ImitationSample& s : dataset)
        if (!(model.predict(s.grid) == s.label)) kept.push_back(s);
    return kept;
}

namespace {

std::vector<double> one_hot(int index, int n) {
    std::vector<double> v(size_t(n), 0.0);
    v[size_t(index)] = 1.0;
    return v;
}

}  // namespace

ImitationTrainResult train_imitation(const std::vector<ImitationSample>& dataset,
                                     const ImitationTrainConfig& cfg) {
    if (dataset.empty()) throw Error(ErrCode::Data, "empty imitation dataset");

    Rng rng(cfg.seed);
    ImitationTrainResult result;
    result.model.encoder = Encoder::init(rng.next_u64());
    result.model.heads = ImitationHeads::init(rng.next_u64());
    ImitationModel& model = result.model;

    // epoch 1: full pass, then drop whatever the fresh model already gets right
    std::vector<ImitationSample> train_set = prune_dataset(model, dataset);
    result.pruned_away = dataset.size() - train_set.size();
    if (train_set.empty())
        throw Error(ErrCode::Data, "pruning removed every sample; nothing left to train on");

    std::vector<Tensor*> params = model.encoder.params();
    for (Tensor* t : model.heads.params()) params.push_back(t);
    Adam opt(params, cfg.learning_rate, cfg.grad_clip);

    std::vector<size_t> order(train_set.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;

    long k_cruise = 0;
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        rng.shuffle(order);
        double loss_sum = 0.0;
        long used = 0, in_batch = 0;
        for (size_t oi : order) {
            const ImitationSample& s = train_set[oi];
            if (s.label.lon == Longitudinal::Cruise) {
                const bool keep = (k_cruise % cfg.cruise_keep_every) == 0;
                ++k_cruise;
                if (!keep) continue;
            }
            Encoder::Acts enc_acts;
            ImitationHeads::Acts head_acts;
            const std::vector<double> enc = model.encoder.forward(s.grid, &enc_acts);
            model.heads.forward(enc, &head_acts);

            const auto lat_target = one_hot(lateral_index(s.label.lat), kNumLateral);
            const auto lon_target = one_hot(longitudinal_index(s.label.lon), kNumLongitudinal);
            std::vector<double> g_lat, g_lon;
            loss_sum += bce_loss_grad(head_acts.lat_prob, lat_target, g_lat);
            loss_sum += bce_loss_grad(head_acts.lon_prob, lon_target, g_lon);

            const std::vector<double> g_enc = model.heads.backward(head_acts, g_lat, g_lon);
            model.encoder.backward(enc_acts, g_enc);

            ++used;
            if (++in_batch == cfg.batch_size) {
                opt.step();
                in_batch = 0;
            }
        }
        if (in_batch > 0) opt.step();
        result.epoch_loss.push_back(used ? loss_sum / double(used) : 0.0);
        result.epoch_samples_used.push_back(used);
    }
    return result;
}

double imitation_accuracy(const ImitationModel& model,
                          const std::vector<ImitationSample>& dataset) {
    if (dataset.empty()) throw Error(ErrCode::Data, "empty imitation dataset");
    long correct = 0;
    for (const ImitationSample& s : dataset)
        if (model.predict(s.grid) == s.label) ++correct;
    return double(correct) / double(dataset.size());
}

void ReplayBuffer::push(Transition t, const MetaAction& rule_label) {
    if (rule_label.lon == Longitudinal::Cruise) {
        ++k_cruise_;
        if (k_cruise_ % cruise_keep_every_ != 0) return;
    }
    if (data_.size() < capacity_) {
        data_.push_back(std::move(t));
    } else {
        data_[head_] = std::move(t);  // overwrite the oldest
        head_ = (head_ + 1) % capacity_;
    }
}

std::vector<const Transition*> ReplayBuffer::sample(Rng& rng, int batch) const {
    if (data_.empty()) throw Error(ErrCode::Data, "replay buffer is empty");
    std::vector<const Transition*> out;
    out.reserve(size_t(batch));
    for (int i = 0; i < batch; ++i) out.push_back(&data_[size_t(rng.uniform_int(int(data_.size())))]);
    return out;
}

DdqnTargets ddqn_target(double reward, const std::vector<double>& next_state, const QNet& primary,
                        const QNet& target, double gamma, bool terminal, bool conventional) {
    if (terminal) return {reward, reward};
    const QNet& selector = conventional ? primary : target;
    const QNet& evaluator = conventional ? target : primary;
    const QNet::Output sel = selector.forward(next_state);
    const QNet::Output eval = evaluator.forward(next_state);
    DdqnTargets t;
    t.lat = reward + gamma * eval.lat_q[size_t(argmax_index(sel.lat_q))];
    t.lon = reward + gamma * eval.lon_q[size_t(argmax_index(sel.lon_q))];
    return t;
}

namespace {

struct TrainLogger {
    std::ofstream out;
    int window = 500;
    long step = 0;
    double loss_sum = 0.0, reward_sum = 0.0, eps_sum = 0.0;
    long n = 0;

    void open(const std::string& path, int win) {
        window = win;
        if (path.empty()) return;
        out.open(path);
        if (!out) throw Error(ErrCode::Io, "cannot write " + path);
        out << "steps,mean_loss,mean_reward,epsilon\n";
    }
    void record(double loss, double reward, double eps) {
        ++step;
        loss_sum += loss;
        reward_sum += reward;
        eps_sum += eps;
        ++n;
        if (n >= window) flush();
    }
    void flush() {
        if (out.is_open() && n > 0) {
            char buf[160];
            std::snprintf(buf, sizeof(buf), "%ld,%.6f,%.6f,%.4f\n", step, loss_sum / double(n),
                          reward_sum / double(n), eps_sum / double(n));
            out << buf;
        }
        loss_sum = reward_sum = eps_sum = 0.0;
        n = 0;
    }
};

}  // namespace

DrlTrainResult train_drl(const EnvFactory& make_env, const std::vector<DrlDataset>& datasets,
                         const Encoder& frozen_encoder, const DrlTrainConfig& cfg) {
    if (datasets.empty()) throw Error(ErrCode::Data, "no training datasets");

    Rng rng(cfg.seed);
    DrlTrainResult result;
    result.qnets = QNetworks::init(rng.next_u64());
    QNetworks& q = result.qnets;

    Adam opt(q.primary.params(), cfg.learning_rate, cfg.grad_clip);
    TrainLogger logger;
    logger.open(cfg.log_path, cfg.log_window);

    long grad_steps_since_sync = 0;

    for (size_t di = 0; di < datasets.size(); ++di) {
        const DrlDataset& ds = datasets[di];
        std::unique_ptr<SimEnv> env = make_env(ds);

        std::vector<int> vehicles = ds.episode_vehicles;
        if (vehicles.empty()) vehicles = env->episode_vehicles();
        if (vehicles.empty())
            throw Error(ErrCode::Data, "dataset " + ds.name + " has no usable episodes");

        // plan the episode list up front so the epsilon schedule knows the
        // total transition count (linear decay over the first half)
        std::vector<int> episode_plan;
        if (cfg.episodes_per_dataset <= 0) {
            episode_plan = vehicles;
        } else {
            for (int e = 0; e < cfg.episodes_per_dataset; ++e)
                episode_plan.push_back(vehicles[size_t(e % int(vehicles.size()))]);
        }
        long total_transitions = 0;
        for (int vid : episode_plan) total_transitions += env->episode_steps(vid);
        const double decay_span = std::max(1.0, double(total_transitions) / 2.0);

        ReplayBuffer buffer(cfg.buffer_capacity, cfg.cruise_keep_every);
        long dataset_step = 0;

        for (int vid : episode_plan) {
            ContextGrid obs = env->reset(vid);
            std::vector<double> state = frozen_encoder.forward(obs);
            bool done = false;
            while (!done) {
                const double eps =
                    std::max(cfg.epsilon_end,
                             cfg.epsilon_start - (cfg.epsilon_start - cfg.epsilon_end) *
                                                     double(dataset_step) / decay_span);
                MetaAction a;
                if (rng.uniform() < eps) {
                    a.lat = lateral_from_index(rng.uniform_int(kNumLateral));
                    a.lon = longitudinal_from_index(rng.uniform_int(kNumLongitudinal));
                } else {
                    a = q.primary.forward(state).argmax();
                }

                StepResult res = env->step(a);
                std::vector<double> next_state = frozen_encoder.forward(res.observation);
                buffer.push({state, a, res.reward.total, next_state, res.done},
                            res.info.rule_label);
                ++dataset_step;
                ++result.env_steps;

                double loss = 0.0;
                if (int(buffer.size()) >= cfg.batch_size) {
                    for (int u = 0; u < std::max(1, cfg.updates_per_step); ++u) {
                        const auto batch = buffer.sample(rng, cfg.batch_size);
                        for (const Transition* tr : batch) {
                            const DdqnTargets targets =
                                ddqn_target(tr->reward, tr->next_state, q.primary, q.target,
                                            cfg.gamma, tr->terminal, cfg.conventional_ddqn);
                            QNet::Acts acts;
                            const QNet::Output out = q.primary.forward(tr->state, &acts);
                            const int la = lateral_index(tr->action.lat);
                            const int lo = longitudinal_index(tr->action.lon);
                            const double e_lat = out.lat_q[size_t(la)] - targets.lat;
                            const double e_lon = out.lon_q[size_t(lo)] - targets.lon;
                            loss += huber_loss(e_lat, cfg.huber_delta) +
                                    huber_loss(e_lon, cfg.huber_delta);
                            std::vector<double> g_lat(kNumLateral, 0.0),
                                g_lon(kNumLongitudinal, 0.0);
                            g_lat[size_t(la)] = huber_grad(e_lat, cfg.huber_delta);
                            g_lon[size_t(lo)] = huber_grad(e_lon, cfg.huber_delta);
                            q.primary.backward(acts, g_lat, g_lon);
                        }
                        opt.step();
                        ++result.gradient_steps;
                        if (++grad_steps_since_sync >= cfg.target_sync_every) {
                            q.sync_target();
                            grad_steps_since_sync = 0;
                        }
                    }
                    loss /= double(cfg.batch_size * std::max(1, cfg.updates_per_step));
                }
                logger.record(loss, res.reward.total, eps);
                state = std::move(next_state);
                done = res.done;
            }
        }

        if (!cfg.checkpoint_dir.empty()) {
            const std::string path =
                cfg.checkpoint_dir + "/qnets_" + std::to_string(di + 1) + "_" + ds.name + ".ckpt";
            qnets_save(q, path);
            result.checkpoints.push_back(path);
        }
    }
    logger.flush();
    return result;
}

}  // namespace pmp
