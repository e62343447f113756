#include "pmp/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <thread>

namespace pmp {

std::vector<bool> jerk_flags(const std::vector<MetaAction>& actions) {
    if (actions.size() < 2)
        throw Error(ErrCode::Data, "jerk flags need at least 2 consecutive actions");
    std::vector<bool> flags(actions.size() - 1, false);
    for (size_t t = 1; t < actions.size(); ++t) {
        const int dlat = lateral_ordinal(actions[t].lat) - lateral_ordinal(actions[t - 1].lat);
        const int dlon =
            longitudinal_ordinal(actions[t].lon) - longitudinal_ordinal(actions[t - 1].lon);
        flags[t - 1] = std::abs(dlat) > 1 || std::abs(dlon) > 1;
    }
    return flags;
}

bool near_collision_flag(const Position& ego_projected, const std::vector<Position>& surrounding,
                         const RewardConfig& cfg) {
    for (const Position& s : surrounding) {
        const double dx = ego_projected[0] - s[0];
        const double dy = ego_projected[1] - s[1];
        if (is_negative_region(classify_region(dx, dy, cfg))) return true;
    }
    return false;
}

AccelStats average_acceleration(const std::vector<double>& velocities_ftps, double dt) {
    if (velocities_ftps.size() < 2)
        throw Error(ErrCode::Data, "acceleration needs at least 2 velocity samples");
    AccelStats st;
    const long n = long(velocities_ftps.size()) - 1;
    for (size_t t = 0; t + 1 < velocities_ftps.size(); ++t) {
        const double a = (velocities_ftps[t + 1] - velocities_ftps[t]) / dt * kFeetToMeters;
        st.signed_mean += a;
        st.abs_mean += std::abs(a);
        st.positive_mean += std::max(0.0, a);
    }
    st.signed_mean /= double(n);
    st.abs_mean /= double(n);
    st.positive_mean /= double(n);
    return st;
}

const char* split_name(Split s) {
    switch (s) {
        case Split::Consensus: return "consensus";
        case Split::Conflict: return "conflict";
        case Split::All: return "all";
    }
    return "?";
}

bool is_consensus(const LabeledSample& s) {
    return s.human.lat == s.rule.lat && s.human.lon == s.rule.lon;
}

ConsensusPartition consensus_split(const std::vector<LabeledSample>& samples) {
    ConsensusPartition part;
    for (size_t i = 0; i < samples.size(); ++i)
        (is_consensus(samples[i]) ? part.consensus : part.conflict).push_back(i);
    return part;
}

Policy make_rule_policy() {
    return [](const PolicyContext& ctx) { return ctx.env->recorded_rule_label(); };
}

Policy make_random_policy() {
    return [](const PolicyContext& ctx) {
        MetaAction a;
        a.lat = lateral_from_index(ctx.rng->uniform_int(kNumLateral));
        a.lon = longitudinal_from_index(ctx.rng->uniform_int(kNumLongitudinal));
        return a;
    };
}

Policy make_imitation_policy(std::shared_ptr<const ImitationModel> model) {
    return [model](const PolicyContext& ctx) { return model->predict(*ctx.observation); };
}

Policy make_drl_policy(std::shared_ptr<const Encoder> encoder,
                       std::shared_ptr<const QNet> qnet) {
    return [encoder, qnet](const PolicyContext& ctx) {
        return qnet->forward(encoder->forward(*ctx.observation)).argmax();
    };
}

namespace {

// per-split accumulation; reduction is associative and commutative
struct SplitAcc {
    long steps = 0;
    long near_collisions = 0;
    double accel_sum = 0.0, accel_abs_sum = 0.0, accel_pos_sum = 0.0;
    long transitions = 0;
    long jerk_flags = 0;

    void merge(const SplitAcc& o) {
        steps += o.steps;
        near_collisions += o.near_collisions;
        accel_sum += o.accel_sum;
        accel_abs_sum += o.accel_abs_sum;
        accel_pos_sum += o.accel_pos_sum;
        transitions += o.transitions;
        jerk_flags += o.jerk_flags;
    }
};

struct EpisodeAcc {
    int vehicle_id = 0;
    SplitAcc by_split[3];  // consensus, conflict, all

    void add_step(Split split, bool nc, double accel_mps2) {
        for (SplitAcc* acc : targets(split)) {
            ++acc->steps;
            acc->near_collisions += nc ? 1 : 0;
            acc->accel_sum += accel_mps2;
            acc->accel_abs_sum += std::abs(accel_mps2);
            acc->accel_pos_sum += std::max(0.0, accel_mps2);
        }
    }
    void add_transition(Split split, bool flagged) {
        for (SplitAcc* acc : targets(split)) {
            ++acc->transitions;
            acc->jerk_flags += flagged ? 1 : 0;
        }
    }
    std::vector<SplitAcc*> targets(Split split) {
        std::vector<SplitAcc*> out{&by_split[2]};  // "all" always accumulates
        if (split == Split::Consensus) out.push_back(&by_split[0]);
        if (split == Split::Conflict) out.push_back(&by_split[1]);
        return out;
    }
};

Split split_of(const std::optional<ManeuverLabel>& human, const MetaAction& rule) {
    if (!human) return Split::All;
    return is_consensus({*human, rule}) ? Split::Consensus : Split::Conflict;
}

MetricsReport report_of(const SplitAcc& acc, const std::string& policy,
                        const std::string& dataset, Split split) {
    MetricsReport r;
    r.policy = policy;
    r.dataset = dataset;
    r.split = split;
    r.steps = acc.steps;
    if (acc.steps > 0) {
        r.avg_accel_mps2 = acc.accel_sum / double(acc.steps);
        r.avg_abs_accel_mps2 = acc.accel_abs_sum / double(acc.steps);
        r.avg_pos_accel_mps2 = acc.accel_pos_sum / double(acc.steps);
        r.near_collision_pct = 100.0 * double(acc.near_collisions) / double(acc.steps);
    }
    if (acc.transitions > 0)
        r.uncomfortable_pct = 100.0 * double(acc.jerk_flags) / double(acc.transitions);
    return r;
}

EvalResult reduce_episodes(std::vector<EpisodeAcc>& per_episode, const std::string& policy,
                           const std::string& dataset) {
    SplitAcc totals[3];
    EvalResult result;
    for (EpisodeAcc& e : per_episode) {
        for (int s = 0; s < 3; ++s) totals[s].merge(e.by_split[s]);
        const SplitAcc& all = e.by_split[2];
        EpisodeMetrics em;
        em.vehicle_id = e.vehicle_id;
        em.steps = all.steps;
        if (all.steps > 0) {
            em.mean_accel_mps2 = all.accel_sum / double(all.steps);
            em.near_collision_pct = 100.0 * double(all.near_collisions) / double(all.steps);
        }
        if (all.transitions > 0)
            em.uncomfortable_pct = 100.0 * double(all.jerk_flags) / double(all.transitions);
        result.episodes.push_back(em);
    }
    const Split splits[3] = {Split::Consensus, Split::Conflict, Split::All};
    for (int s = 0; s < 3; ++s)
        result.reports.push_back(report_of(totals[s], policy, dataset, splits[s]));
    return result;
}

}  // namespace

EvalResult evaluate_policy(const std::string& policy_name, const Policy& policy,
                           const std::string& dataset_name, const FrameIndex& idx,
                           const MnnParams& mnn, const RewardConfig& reward_cfg,
                           const ControlTable& controls, uint64_t seed, int workers) {
    SimEnv probe(idx, mnn, reward_cfg, controls);
    const std::vector<int> vehicles = probe.episode_vehicles();
    if (vehicles.empty()) throw Error(ErrCode::Data, "dataset has no usable episodes");

    std::vector<EpisodeAcc> per_episode(vehicles.size());

    auto run_episode = [&](size_t i) {
        const int vid = vehicles[i];
        SimEnv env(idx, mnn, reward_cfg, controls);
        Rng rng(seed ^ (uint64_t(vid) * 0x9e3779b97f4a7c15ull));
        EpisodeAcc& acc = per_episode[i];
        acc.vehicle_id = vid;

        ContextGrid obs = env.reset(vid);
        bool have_prev = false;
        MetaAction prev_action;
        bool done = false;
        while (!done) {
            PolicyContext ctx{&obs, &env, &rng};
            const MetaAction a = policy(ctx);
            const double v_before = env.ego().v;
            StepResult res = env.step(a);
            const Split split = split_of(res.info.human_label, res.info.rule_label);
            const double accel =
                (env.ego().v - v_before) / kStepSeconds * kFeetToMeters;
            acc.add_step(split, res.info.near_collision, accel);
            if (have_prev) {
                const std::vector<MetaAction> pair = {prev_action, a};
                acc.add_transition(split, jerk_flags(pair)[0]);
            }
            prev_action = a;
            have_prev = true;
            obs = std::move(res.observation);
            done = res.done;
        }
    };

    const int n_workers = std::max(1, workers);
    if (n_workers == 1) {
        for (size_t i = 0; i < vehicles.size(); ++i) run_episode(i);
    } else {
        std::vector<std::thread> pool;
        std::atomic<size_t> next{0};
        for (int w = 0; w < n_workers; ++w)
            pool.emplace_back([&] {
                for (size_t i = next.fetch_add(1); i < vehicles.size(); i = next.fetch_add(1))
                    run_episode(i);
            });
        for (auto& t : pool) t.join();
    }

    return reduce_episodes(per_episode, policy_name, dataset_name);
}

EvalResult evaluate_recorded(const std::string& dataset_name, const FrameIndex& idx,
                             const RewardConfig& reward_cfg) {
    RewardConfig cfg = reward_cfg;
    cfg.n_lanes = idx.meta.n_lanes;
    cfg.lane_width = idx.meta.lane_width;

    std::vector<EpisodeAcc> per_episode;
    for (const auto& [vid, track] : idx.tracks) {
        if (track.size() < kMinEpisodeTrack) continue;
        EpisodeAcc acc;
        acc.vehicle_id = vid;

        const int first = kEpisodeHistoryMargin;
        const int last = track.size() - kEpisodeFutureMargin - 1;
        bool have_prev = false;
        MetaAction prev_action;
        for (int i = first; i <= last; ++i) {
            const TrajectoryPoint& cur = track.points[size_t(i)];
            const TrajectoryPoint& next = track.points[size_t(i + 1)];
            const MetaAction rule = rule_label_at(idx, track, cur.frame_id, cfg);
            std::optional<ManeuverLabel> human;
            if (labelable(track, cur.frame_id))
                human = ManeuverLabel{label_lateral(track, cur.frame_id),
                                      label_longitudinal(track, cur.frame_id)};
            const Split split = split_of(human, rule);

            std::vector<Position> surrounding;
            for (const auto& [ovid, p] :
                 neighbors_of_pose(idx, next.frame_id, next.local_y, next.lane_id, vid))
                surrounding.push_back({p.local_x, p.local_y});
            const bool nc =
                near_collision_flag({next.local_x, next.local_y}, surrounding, cfg);
            const double accel =
                (next.velocity - cur.velocity) / kStepSeconds * kFeetToMeters;
            acc.add_step(split, nc, accel);

            if (human) {
                if (have_prev) {
                    const std::vector<MetaAction> pair = {prev_action, *human};
                    acc.add_transition(split, jerk_flags(pair)[0]);
                }
                prev_action = *human;
                have_prev = true;
            }
        }
        per_episode.push_back(std::move(acc));
    }
    if (per_episode.empty()) throw Error(ErrCode::Data, "dataset has no usable episodes");
    return reduce_episodes(per_episode, "dataset", dataset_name);
}

void write_reports_csv(const std::vector<MetricsReport>& reports, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrCode::Io, "cannot write " + path);
    out << "policy,dataset,split,avg_accel_mps2,avg_abs_accel_mps2,avg_pos_accel_mps2,"
           "uncomfortable_pct,near_collision_pct,steps\n";
    char buf[256];
    for (const MetricsReport& r : reports) {
        std::snprintf(buf, sizeof(buf), "%s,%s,%s,%.6f,%.6f,%.6f,%.4f,%.4f,%ld\n",
                      r.policy.c_str(), r.dataset.c_str(), split_name(r.split), r.avg_accel_mps2,
                      r.avg_abs_accel_mps2, r.avg_pos_accel_mps2, r.uncomfortable_pct,
                      r.near_collision_pct, r.steps);
        out << buf;
    }
}

void write_episode_metrics_csv(const std::vector<EpisodeMetrics>& episodes,
                               const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrCode::Io, "cannot write " + path);
    out << "vehicle_id,steps,mean_accel_mps2,uncomfortable_pct,near_collision_pct\n";
    char buf[160];
    for (const EpisodeMetrics& e : episodes) {
        std::snprintf(buf, sizeof(buf), "%d,%ld,%.6f,%.4f,%.4f\n", e.vehicle_id, e.steps,
                      e.mean_accel_mps2, e.uncomfortable_pct, e.near_collision_pct);
        out << buf;
    }
}

}  // namespace pmp
