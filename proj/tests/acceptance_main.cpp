// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criterion 11 runs only when recorded NGSIM files are supplied via
// environment variables and reports SKIP otherwise.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pmp/evaluation.hpp"
#include "pmp/training.hpp"

using namespace pmp;

namespace {

int g_failures = 0;

struct Outcome {
    bool pass = false;
    bool skipped = false;
    std::string detail;
};

void report(int number, const std::string& name, const std::function<Outcome()>& run) {
    Outcome o;
    try {
        o = run();
    } catch (const std::exception& e) {
        o = {false, false, std::string("exception: ") + e.what()};
    }
    const char* tag = o.skipped ? "SKIP" : (o.pass ? "PASS" : "FAIL");
    std::printf("%s criterion %2d: %s%s%s\n", tag, number, name.c_str(),
                o.detail.empty() ? "" : " -- ", o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass && !o.skipped) ++g_failures;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof(buf), f, ap);
    va_end(ap);
    return buf;
}

// ---- criterion 1: reward oracle equivalence ---------------------------------

Outcome criterion_reward_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    const RewardConfig cfg;
    Rng rng(424242);
    double worst = 0.0;
    for (int it = 0; it < 10000; ++it) {
        const oracle::SceneSample s = oracle::random_scene(rng);
        std::vector<Position> vehicles;
        for (const auto& v : s.vehicles) vehicles.push_back({v[0], v[1]});
        const RewardBreakdown got =
            total_reward({s.ego_pred[0], s.ego_pred[1]}, {s.ego_actual[0], s.ego_actual[1]},
                         vehicles, cfg);
        const oracle::RewardOut want = oracle::reward_transcription(
            s.ego_pred[0], s.ego_pred[1], s.ego_actual[0], s.ego_actual[1], s.vehicles,
            cfg.n_lanes, cfg.lane_width);
        worst = std::max(worst, std::abs(got.total - want.reward));
        worst = std::max(worst, std::abs(got.r_dis - want.r_dis));
        if (got.p_count != want.p_count || got.n_count != want.n_count ||
            got.p1 != want.p1 || got.p2 != want.p2 || got.p3 != want.p3)
            return {false, false, "region counts diverged"};
    }
    const double secs = seconds_since(t0);
    return {worst < 1e-9 && secs < 5.0, false,
            fmt("max |diff| %.2e over 10000 scenes in %.2f s", worst, secs)};
}

// ---- criterion 2: named reward values ---------------------------------------

Outcome criterion_named_rewards() {
    const RewardConfig cfg;
    const std::vector<Position> a = {{0, -30}};
    const std::vector<Position> b = {{0, -10}};
    const std::vector<Position> c = {{-10, -5}};
    const double ra = distance_reward({0, 0}, a, cfg).r_dis;
    const double rb = distance_reward({0, 0}, b, cfg).r_dis;
    const double rc = distance_reward({0, 0}, c, cfg).r_dis;
    const bool values = std::abs(ra - 4.166667) < 1e-5 && std::abs(rb - (-9.999877)) < 1e-5 &&
                        std::abs(rc - 4.933069) < 1e-5;
    const bool boundary = (cfg.d2 / cfg.c1 == 5.0) && (cfg.c2 / cfg.d2 == 5.0);
    return {values && boundary, false,
            fmt("r = %.6f / %.6f / %.6f, d2 boundary %s", ra, rb, rc,
                boundary ? "exact" : "BROKEN")};
}

// ---- criterion 3: POM decay and mass conservation ---------------------------

Outcome criterion_pom() {
    const bool decay = std::abs(occupancy_probability(0) - 0.955798) < 1e-6 &&
                       std::abs(occupancy_probability(10) - 0.912719) < 1e-6 &&
                       std::abs(occupancy_probability(30) - 0.810588) < 1e-6;
    if (!decay) return {false, false, "decay values off"};

    Rng rng(112233);
    double worst = 0.0;
    for (int it = 0; it < 1000; ++it) {
        GridInputs in;
        in.ego_history.assign(size_t(GridSpec::kPast), GridPose{30.0, 500.0, 3});
        NeighborInput nb;
        nb.vehicle_id = 2;
        nb.past.assign(size_t(GridSpec::kPast), std::nullopt);
        const int row = 1 + rng.uniform_int(11);
        const int k = 1 + rng.uniform_int(30);
        nb.prediction.positions.assign(size_t(GridSpec::kFuture), {30.0, 500.0});
        nb.prediction.positions[size_t(k - 1)] = {30.0 + rng.uniform(-5.9, 5.9),
                                                  500.0 + (6 - row) * 15.0 + rng.uniform(-7.4, 7.4)};
        in.neighbors.push_back(nb);
        const ContextGrid g = build_grid(in);
        double mass = 0.0;
        for (int r = 0; r < GridSpec::kRows; ++r)
            for (int col = 0; col < GridSpec::kCols; ++col) mass += g.at(r, col, 30 + k - 1);
        worst = std::max(worst, std::abs(mass - 1.0));
    }
    return {worst <= 1e-12, false, fmt("worst |mass-1| = %.2e over 1000 placements", worst)};
}

// ---- criterion 4: grid vs brute-force rasterizer -----------------------------

Outcome criterion_grid_equivalence() {
    Rng rng(445566);
    for (int it = 0; it < 1000; ++it) {
        GridInputs in;
        in.lane_width = 12.0;
        const int ego_lane = 1 + rng.uniform_int(5);
        double ego_y = rng.uniform(0.0, 500.0);
        for (int c = 0; c < GridSpec::kPast; ++c) {
            in.ego_history.push_back({(ego_lane - 0.5) * 12.0, ego_y, ego_lane});
            ego_y += rng.uniform(0.0, 2.0);
        }
        const int n = rng.uniform_int(9);
        for (int v = 0; v < n; ++v) {
            NeighborInput nb;
            nb.vehicle_id = v + 2;
            const int lane = 1 + rng.uniform_int(5);
            double y = in.ego_history.back().y + rng.uniform(-110.0, 110.0);
            for (int c = 0; c < GridSpec::kPast; ++c) {
                if (rng.uniform() < 0.2)
                    nb.past.push_back(std::nullopt);
                else
                    nb.past.push_back(GridPose{(lane - 0.5) * 12.0, y, lane});
                y += rng.uniform(0.0, 2.0);
            }
            for (int k = 0; k < GridSpec::kFuture; ++k)
                nb.prediction.positions.push_back(
                    {rng.uniform(0.0, 60.0), in.ego_history.back().y + rng.uniform(-110.0, 110.0)});
            in.neighbors.push_back(std::move(nb));
        }
        const ContextGrid got = build_grid(in);
        const ContextGrid want = oracle::rasterize(in);
        if (!(got.values == want.values))
            return {false, false, fmt("mismatch at scene %d", it)};
    }
    return {true, false, "1000 random scenes bitwise equal"};
}

// ---- criterion 5: unicycle analytics ----------------------------------------

Outcome criterion_unicycle() {
    // straight line: exact heading, exact per-step displacement
    EgoState s{3.0, 5.0, 12.5, 0.0};
    for (int n = 0; n < 100; ++n) {
        const EgoState next = step_unicycle(s, {0.0, 0.0}, 0.1);
        if (next.phi != 0.0 || next.x != 3.0) return {false, false, "straight line drifted"};
        if (std::abs(std::hypot(next.x - s.x, next.y - s.y) - 1.25) > 1e-12)
            return {false, false, "straight-line step length off"};
        s = next;
    }

    // constant curvature: heading exact, radius within 1% of v dt / dphi
    const double dphi = 0.01, v = 15.0, dt = 0.1;
    EgoState c{0.0, 0.0, v, 0.0};
    const double r_exact = v * dt / (2.0 * std::sin(dphi / 2.0));
    const double cx = r_exact * std::cos(dphi / 2.0);
    const double cy = -r_exact * std::sin(dphi / 2.0);
    double worst_rel = 0.0;
    for (int n = 1; n <= 100; ++n) {
        c = step_unicycle(c, {0.0, dphi}, dt);
        if (std::abs(c.phi - n * dphi) > 1e-12) return {false, false, "heading not exact"};
        const double r = std::hypot(c.x - cx, c.y - cy);
        worst_rel = std::max(worst_rel, std::abs(r - v * dt / dphi) / (v * dt / dphi));
    }
    return {worst_rel < 0.01, false, fmt("circle radius max rel err %.2e", worst_rel)};
}

// ---- criterion 6: gradient suite ---------------------------------------------

bool fd_match(double analytic, double numeric, double tol = 1e-4) {
    const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
    return std::abs(analytic - numeric) / denom < tol;
}

Outcome criterion_gradients() {
    const auto t0 = std::chrono::steady_clock::now();
    const double eps = 1e-5;

    // MNN: every parameter
    {
        MnnParams p = mnn_init(6, 77);
        Rng rng(78);
        std::vector<std::vector<std::array<double, 2>>> seqs(2);
        for (auto& s : seqs)
            for (int i = 0; i < 10; ++i) s.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1)});
        std::vector<double> grad;
        mnn_loss_grad(p, seqs, grad);
        std::vector<double*> ptrs = p.param_ptrs();
        for (size_t i = 0; i < ptrs.size(); ++i) {
            const double saved = *ptrs[i];
            *ptrs[i] = saved + eps;
            const double up = mnn_loss(p, seqs);
            *ptrs[i] = saved - eps;
            const double down = mnn_loss(p, seqs);
            *ptrs[i] = saved;
            if (!fd_match(grad[i], (up - down) / (2 * eps)))
                return {false, false, fmt("mnn grad mismatch at %zu", i)};
        }
    }

    // conv + dense + pool through the encoder, every tensor sampled densely
    {
        Encoder e = Encoder::init(79);
        Rng rng(80);
        ContextGrid g;
        for (double& v : g.values) v = rng.uniform() < 0.7 ? 0.0 : rng.uniform(0.0, 1.0);
        auto loss = [&] {
            double l = 0;
            for (double v : e.forward(g)) l += v;
            return l;
        };
        Encoder::Acts acts;
        e.forward(g, &acts);
        for (Tensor* t : e.params()) t->zero_grad();
        e.backward(acts, std::vector<double>(size_t(kEncodingDim), 1.0));
        for (Tensor* t : e.params()) {
            const size_t stride = std::max<size_t>(1, t->v.size() / 60);
            for (size_t i = 0; i < t->v.size(); i += stride) {
                const double saved = t->v[i];
                t->v[i] = saved + eps;
                const double up = loss();
                t->v[i] = saved - eps;
                const double down = loss();
                t->v[i] = saved;
                if (!fd_match(t->g[i], (up - down) / (2 * eps)))
                    return {false, false, "encoder grad mismatch"};
            }
        }
    }

    // BCE through softmax heads
    {
        ImitationHeads h = ImitationHeads::init(81);
        Rng rng(82);
        std::vector<double> enc(size_t(kEncodingDim), 0.0);
        for (double& v : enc) v = rng.uniform(-1, 1);
        const std::vector<double> ylat = {0, 1, 0, 0, 0}, ylon = {0, 0, 0, 1};
        auto loss = [&] {
            const auto out = h.forward(enc);
            return bce_loss(out.lat_prob, ylat) + bce_loss(out.lon_prob, ylon);
        };
        ImitationHeads::Acts acts;
        h.forward(enc, &acts);
        for (Tensor* t : h.params()) t->zero_grad();
        std::vector<double> g_lat, g_lon;
        bce_loss_grad(acts.lat_prob, ylat, g_lat);
        bce_loss_grad(acts.lon_prob, ylon, g_lon);
        h.backward(acts, g_lat, g_lon);
        for (Tensor* t : h.params()) {
            const size_t stride = std::max<size_t>(1, t->v.size() / 40);
            for (size_t i = 0; i < t->v.size(); i += stride) {
                const double saved = t->v[i];
                t->v[i] = saved + eps;
                const double up = loss();
                t->v[i] = saved - eps;
                const double down = loss();
                t->v[i] = saved;
                if (!fd_match(t->g[i], (up - down) / (2 * eps)))
                    return {false, false, "bce-head grad mismatch"};
            }
        }
    }

    // Huber through the Q net
    {
        QNet q = QNet::init(83);
        Rng rng(84);
        std::vector<double> enc(size_t(kEncodingDim), 0.0);
        for (double& v : enc) v = rng.uniform(-1, 1);
        auto loss = [&] {
            const auto out = q.forward(enc);
            return huber_loss(out.lat_q[3] - 2.0, 1.0) + huber_loss(out.lon_q[1] - 0.2, 1.0);
        };
        QNet::Acts acts;
        const auto out0 = q.forward(enc, &acts);
        for (Tensor* t : q.params()) t->zero_grad();
        std::vector<double> g_lat(kNumLateral, 0.0), g_lon(kNumLongitudinal, 0.0);
        g_lat[3] = huber_grad(out0.lat_q[3] - 2.0, 1.0);
        g_lon[1] = huber_grad(out0.lon_q[1] - 0.2, 1.0);
        q.backward(acts, g_lat, g_lon);
        for (Tensor* t : q.params()) {
            const size_t stride = std::max<size_t>(1, t->v.size() / 40);
            for (size_t i = 0; i < t->v.size(); i += stride) {
                const double saved = t->v[i];
                t->v[i] = saved + eps;
                const double up = loss();
                t->v[i] = saved - eps;
                const double down = loss();
                t->v[i] = saved;
                if (!fd_match(t->g[i], (up - down) / (2 * eps)))
                    return {false, false, "huber-qnet grad mismatch"};
            }
        }
    }

    const double secs = seconds_since(t0);
    return {secs < 30.0, false, fmt("all paths matched in %.1f s", secs)};
}

// ---- criterion 7: cruise retention quotas -------------------------------------

ContextGrid lead_grid(double gap) {
    ContextGrid g;
    const int row = 6 - int(std::lround(gap / 15.0));
    for (int c = 0; c < GridSpec::kChannels; ++c)
        if (row >= 0 && row <= 12) g.at(row, 1, c) = c < 30 ? 1.0 : 0.9;
    return g;
}

Outcome criterion_quotas() {
    // imitation: 100 cruise samples -> exactly 20 used per epoch
    std::vector<ImitationSample> ds;
    for (int i = 0; i < 100; ++i)
        ds.push_back({lead_grid(38.0), {Lateral::HardLeft, Longitudinal::Cruise}});
    ImitationTrainConfig cfg;
    cfg.epochs = 3;
    cfg.seed = 3;
    const ImitationTrainResult r = train_imitation(ds, cfg);
    if (r.pruned_away != 0) return {false, false, "unexpected pruning in quota fixture"};
    for (long used : r.epoch_samples_used)
        if (used != 20) return {false, false, fmt("epoch used %ld of 100 cruise samples", used)};

    // replay: 10 cruise -> 5 stored; 10 brake -> 10 stored; 1000 -> 500
    Transition t;
    t.state = {0.0};
    t.next_state = {0.0};
    ReplayBuffer a(100000);
    for (int i = 0; i < 10; ++i) a.push(t, {Lateral::SameLane, Longitudinal::Cruise});
    ReplayBuffer b(100000);
    for (int i = 0; i < 10; ++i) b.push(t, {Lateral::SameLane, Longitudinal::Brake});
    ReplayBuffer c(100000);
    for (int i = 0; i < 1000; ++i) c.push(t, {Lateral::SameLane, Longitudinal::Cruise});
    const bool ok = a.size() == 5 && b.size() == 10 && c.size() == 500;
    return {ok, false,
            fmt("imitation 20/100 per epoch; replay %zu/10 cruise, %zu/10 brake, %zu/1000",
                a.size(), b.size(), c.size())};
}

// ---- criterion 8: toy DRL learning --------------------------------------------

// Each episode starts just outside the near-collision zone behind a lead
// that soon brakes to a 4.5 ft/s crawl and holds it. Cruising plows into the
// negative region; stopping for good bleeds imitation reward as the recorded
// ego keeps crawling. The profitable behavior is to back off early and
// follow the lead at a safe distance on a narrow three-lane road.
FrameIndex single_lead_dataset(uint64_t seed) {
    Rng rng(seed);
    std::vector<VehicleTrack> tracks;
    const int pairs = 20, frames = 170;
    const double lane_x = 18.0;  // center lane of three
    for (int p = 0; p < pairs; ++p) {
        const double base_y = p * 3000.0;
        const int ego_id = 2 * p + 1, lead_id = 2 * p + 2;
        const double v0 = 14.0 + rng.uniform(-1.0, 1.0);
        const int brake_at = 38 + rng.uniform_int(12);
        VehicleTrack ego, lead;
        ego.vehicle_id = ego_id;
        lead.vehicle_id = lead_id;
        double ego_y = base_y, lead_y = base_y + 15.0 + rng.uniform(0.0, 8.0);
        double ego_v = v0, lead_v = v0;
        for (int f = 0; f < frames; ++f) {
            ego.points.push_back({ego_id, f + 1, lane_x, ego_y, 2, ego_v});
            lead.points.push_back({lead_id, f + 1, lane_x, lead_y, 2, lead_v});
            if (f >= brake_at) lead_v = std::max(4.5, lead_v - 2.0);
            if (f >= 30) ego_v = std::max(4.5, ego_v - 0.7);
            ego_y += ego_v * 0.1;
            lead_y += lead_v * 0.1;
        }
        tracks.push_back(std::move(ego));
        tracks.push_back(std::move(lead));
    }
    FrameIndex idx;
    idx.meta.n_lanes = 3;
    for (auto& t : tracks) idx.tracks.emplace(t.vehicle_id, std::move(t));
    finalize_index(idx);
    return idx;
}

struct PolicyStats {
    double nc_rate = 0.0;
    double mean_episode_reward = 0.0;
};

PolicyStats roll_policy(SimEnv& env, const std::vector<int>& vehicles,
                        const std::function<MetaAction(const std::vector<double>&, Rng&)>& decide,
                        const Encoder& encoder, uint64_t seed, int passes) {
    long nc = 0, steps = 0;
    double reward_sum = 0.0;
    long episodes = 0;
    for (int pass = 0; pass < passes; ++pass) {
        for (int vid : vehicles) {
            Rng rng(seed ^ uint64_t(vid * 2654435761u) ^ (uint64_t(pass) << 32));
            ContextGrid obs = env.reset(vid);
            bool done = false;
            double ep_reward = 0.0;
            while (!done) {
                const std::vector<double> enc = encoder.forward(obs);
                const StepResult res = env.step(decide(enc, rng));
                nc += res.info.near_collision ? 1 : 0;
                ++steps;
                ep_reward += res.reward.total;
                obs = res.observation;
                done = res.done;
            }
            reward_sum += ep_reward;
            ++episodes;
        }
    }
    return {double(nc) / double(steps), reward_sum / double(episodes)};
}

Outcome criterion_toy_drl() {
    const auto t0 = std::chrono::steady_clock::now();
    const FrameIndex idx = single_lead_dataset(20240601);

    // MNN trained on the replayed traffic
    MnnTrainConfig mnn_cfg;
    mnn_cfg.hidden = 8;
    mnn_cfg.epochs = 40;
    mnn_cfg.learning_rate = 0.02;
    mnn_cfg.seed = 5;
    const MnnParams mnn = mnn_train(idx, mnn_cfg).params;

    std::vector<int> egos;
    for (int p = 0; p < 20; ++p) egos.push_back(2 * p + 1);

    // imitation pre-training provides the frozen encoder
    std::vector<ImitationSample> imit;
    for (int vid : egos) {
        const VehicleTrack& track = idx.tracks.at(vid);
        int taken = 0;
        for (const auto& pt : track.points) {
            if (!labelable(track, pt.frame_id) || ++taken % 2 == 0) continue;
            imit.push_back({observation_for_recorded(idx, track, pt.frame_id, mnn),
                            {label_lateral(track, pt.frame_id),
                             label_longitudinal(track, pt.frame_id)}});
        }
    }
    ImitationTrainConfig imit_cfg;
    imit_cfg.epochs = 4;
    imit_cfg.learning_rate = 1e-3;
    imit_cfg.seed = 6;
    const ImitationTrainResult imit_result = train_imitation(imit, imit_cfg);
    const Encoder& encoder = imit_result.model.encoder;

    // 200-episode DDQN run
    std::vector<DrlDataset> datasets;
    datasets.push_back({"toy", &idx, egos});
    EnvFactory factory = [&](const DrlDataset& ds) {
        return std::make_unique<SimEnv>(*ds.data, mnn);
    };
    DrlTrainConfig drl_cfg;
    drl_cfg.episodes_per_dataset = 200;
    drl_cfg.gamma = 0.9;  // 90-step episodes; keeps the value scale reachable
    drl_cfg.learning_rate = 3e-3;
    drl_cfg.target_sync_every = 500;
    drl_cfg.updates_per_step = 3;
    drl_cfg.seed = 7;
    const DrlTrainResult trained = train_drl(factory, datasets, encoder, drl_cfg);

    // greedy learned policy vs uniform random on the same episodes
    SimEnv env(idx, mnn);
    const QNet& qnet = trained.qnets.primary;
    const PolicyStats greedy = roll_policy(
        env, egos,
        [&](const std::vector<double>& enc, Rng&) { return qnet.forward(enc).argmax(); },
        encoder, 100, 1);
    const PolicyStats random = roll_policy(
        env, egos,
        [&](const std::vector<double>&, Rng& rng) {
            return MetaAction{lateral_from_index(rng.uniform_int(kNumLateral)),
                              longitudinal_from_index(rng.uniform_int(kNumLongitudinal))};
        },
        encoder, 200, 2);

    const double secs = seconds_since(t0);
    const bool nc_ok = greedy.nc_rate <= 0.5 * random.nc_rate;
    const bool reward_ok = greedy.mean_episode_reward > random.mean_episode_reward;
    return {nc_ok && reward_ok && secs < 600.0, false,
            fmt("near-collision %.3f vs random %.3f; reward %.1f vs %.1f; %.0f s",
                greedy.nc_rate, random.nc_rate, greedy.mean_episode_reward,
                random.mean_episode_reward, secs)};
}

// ---- criterion 9: imitation learnability ---------------------------------------

Outcome criterion_imitation_learnability() {
    const auto t0 = std::chrono::steady_clock::now();
    auto make = [](int n, uint64_t seed) {
        Rng rng(seed);
        std::vector<ImitationSample> out;
        for (int i = 0; i < n; ++i) {
            const int band = rng.uniform_int(4);
            double gap;
            MetaAction label;
            switch (band) {
                case 0: gap = 8.0; label = {Lateral::SameLane, Longitudinal::Brake}; break;
                case 1: gap = 30.0; label = {Lateral::SoftLeft, Longitudinal::Decelerate}; break;
                case 2: gap = 52.0; label = {Lateral::SameLane, Longitudinal::Cruise}; break;
                default: gap = 75.0; label = {Lateral::SameLane, Longitudinal::Accelerate}; break;
            }
            out.push_back({lead_grid(gap), label});
        }
        return out;
    };
    const auto train_set = make(600, 91);
    const auto held_out = make(200, 92);
    ImitationTrainConfig cfg;
    cfg.epochs = 25;
    cfg.learning_rate = 1e-3;
    cfg.seed = 93;
    const ImitationTrainResult r = train_imitation(train_set, cfg);
    const double acc = imitation_accuracy(r.model, held_out);
    const double secs = seconds_since(t0);
    return {acc >= 0.90 && secs < 300.0, false,
            fmt("held-out accuracy %.1f%% in %.0f s (pruned %zu)", 100.0 * acc, secs,
                r.pruned_away)};
}

// ---- criterion 10: metric correctness -------------------------------------------

Outcome criterion_metrics() {
    using L = Lateral;
    using G = Longitudinal;
    // hand-counted jerk sequences
    if (jerk_flags({{L::SameLane, G::Accelerate},
                    {L::SameLane, G::Cruise},
                    {L::SameLane, G::Decelerate}}) != std::vector<bool>{false, false})
        return {false, false, "smooth chain misflagged"};
    if (jerk_flags({{L::SameLane, G::Accelerate}, {L::SameLane, G::Brake}}) !=
        std::vector<bool>{true})
        return {false, false, "accelerate->brake not flagged"};
    if (jerk_flags({{L::SameLane, G::Cruise}, {L::HardRight, G::Cruise}}) !=
        std::vector<bool>{true})
        return {false, false, "same->hard_right not flagged"};

    // consensus split hand counts
    std::vector<LabeledSample> samples;
    for (int i = 0; i < 7; ++i)
        samples.push_back({{L::SameLane, G::Cruise}, {L::SameLane, G::Cruise}});
    for (int i = 0; i < 3; ++i)
        samples.push_back({{L::SoftLeft, G::Cruise}, {L::SameLane, G::Cruise}});
    const ConsensusPartition part = consensus_split(samples);
    if (part.consensus.size() != 7 || part.conflict.size() != 3)
        return {false, false, "consensus split miscounted"};

    // near-collision predicate == negative-region membership on 10k scenes
    const RewardConfig cfg;
    Rng rng(990011);
    for (int it = 0; it < 10000; ++it) {
        const oracle::SceneSample s = oracle::random_scene(rng);
        std::vector<Position> vehicles;
        for (const auto& v : s.vehicles) vehicles.push_back({v[0], v[1]});
        const bool flag = near_collision_flag({s.ego_pred[0], s.ego_pred[1]}, vehicles, cfg);
        const RewardBreakdown b =
            total_reward({s.ego_pred[0], s.ego_pred[1]}, {s.ego_actual[0], s.ego_actual[1]},
                         vehicles, cfg);
        if (flag != (b.n_count > 0)) return {false, false, "predicate diverged from reward"};
    }
    return {true, false, "jerk, splits, and 10k-scene predicate agreement"};
}

// ---- criterion 11: conditional NGSIM checks --------------------------------------

Outcome criterion_ngsim() {
    const char* us101_0750 = std::getenv("PMP_NGSIM_US101_0750");
    const char* us101_0805 = std::getenv("PMP_NGSIM_US101_0805");
    const char* i80_1700 = std::getenv("PMP_NGSIM_I80_1700");
    if (!us101_0750 && !us101_0805 && !i80_1700)
        return {true, true,
                "no recorded trajectory files supplied "
                "(set PMP_NGSIM_US101_0750 / PMP_NGSIM_US101_0805 / PMP_NGSIM_I80_1700)"};

    DatasetMeta meta;
    meta.n_lanes = 8;
    std::string detail;
    bool ok = true;

    if (us101_0750) {
        const FrameIndex idx = ingest_csv(us101_0750, meta);
        const LabelStats st = label_distribution(idx);
        struct Expect {
            double value;
            double got;
            const char* name;
        };
        const Expect expects[] = {
            {90.45, st.lateral_pct(Lateral::SameLane), "follow same lane"},
            {0.26, st.lateral_pct(Lateral::HardLeft), "hard left"},
            {4.13, st.lateral_pct(Lateral::SoftLeft), "soft left"},
            {0.12, st.lateral_pct(Lateral::HardRight), "hard right"},
            {5.04, st.lateral_pct(Lateral::SoftRight), "soft right"},
            {13.65, st.longitudinal_pct(Longitudinal::Accelerate), "accelerate"},
            {0.36, st.longitudinal_pct(Longitudinal::Brake), "brake"},
            {79.79, st.longitudinal_pct(Longitudinal::Cruise), "cruise"},
            {6.20, st.longitudinal_pct(Longitudinal::Decelerate), "decelerate"},
            {70.62, st.same_lane_and_cruise_pct(), "same lane & cruise"},
        };
        for (const Expect& e : expects) {
            if (std::abs(e.got - e.value) > 2.0) {
                ok = false;
                detail += fmt("%s %.2f%% (want %.2f±2); ", e.name, e.got, e.value);
            }
        }
        detail += fmt("US101 07:50 same-lane %.2f%% cruise %.2f%%; ",
                      st.lateral_pct(Lateral::SameLane),
                      st.longitudinal_pct(Longitudinal::Cruise));
    }

    auto near_collision_rates = [&](const char* path) {
        const FrameIndex idx = ingest_csv(path, meta);
        const EvalResult r = evaluate_recorded("ngsim", idx, {});
        return std::pair<double, double>(r.reports[0].near_collision_pct,
                                         r.reports[1].near_collision_pct);
    };
    if (i80_1700) {
        const auto [cons, conf] = near_collision_rates(i80_1700);
        if (std::abs(cons - 7.312) > 2.0 || std::abs(conf - 16.094) > 2.0) ok = false;
        detail += fmt("I80 17:00 nc %.3f/%.3f (want 7.312/16.094±2); ", cons, conf);
    }
    if (us101_0805) {
        const auto [cons, conf] = near_collision_rates(us101_0805);
        if (std::abs(cons - 2.099) > 2.0 || std::abs(conf - 4.650) > 2.0) ok = false;
        detail += fmt("US101 08:05 nc %.3f/%.3f (want 2.099/4.650±2)", cons, conf);
    }
    return {ok, false, detail};
}

}  // namespace

int main() {
    std::printf("acceptance suite\n");
    report(1, "reward oracle equivalence (10k scenes, 1e-9, <5 s)", criterion_reward_oracle);
    report(2, "named reward values and P2/P3 boundary", criterion_named_rewards);
    report(3, "POM decay values and mass conservation", criterion_pom);
    report(4, "grid equals brute-force rasterizer (1k scenes)", criterion_grid_equivalence);
    report(5, "unicycle straight-line and circle analytics", criterion_unicycle);
    report(6, "finite-difference gradient suite (<30 s)", criterion_gradients);
    report(7, "cruise retention quotas (20% imitation, 50% replay)", criterion_quotas);
    report(8, "toy DRL beats random (near-collision halved, higher reward)", criterion_toy_drl);
    report(9, "imitation learnability (>=90% held-out)", criterion_imitation_learnability);
    report(10, "metric correctness (jerk, splits, shared predicate)", criterion_metrics);
    report(11, "conditional recorded-data checks", criterion_ngsim);

    if (g_failures > 0) {
        std::printf("%d criterion(s) FAILED\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
