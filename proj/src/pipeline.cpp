#include "pmp/pipeline.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "pmp/evaluation.hpp"
#include "pmp/training.hpp"

namespace pmp {

namespace {

namespace fs = std::filesystem;

struct CommandContext {
    const RunConfig& cfg;
    std::string out_dir;
    std::vector<std::string> artifacts;

    explicit CommandContext(const RunConfig& c) : cfg(c), out_dir(c.get_string("out.dir")) {
        std::error_code ec;
        fs::create_directories(out_dir, ec);
        if (ec) throw Error(ErrCode::Io, "cannot create output directory " + out_dir);
    }

    std::string path(const std::string& name) const { return out_dir + "/" + name; }
    void made(const std::string& p) { artifacts.push_back(p); }

    void write_manifest() const {
        const std::string manifest = path("manifest.csv");
        std::ofstream out(manifest);
        if (!out) throw Error(ErrCode::Io, "cannot write " + manifest);
        char hash[32];
        std::snprintf(hash, sizeof(hash), "%016llx",
                      static_cast<unsigned long long>(cfg.hash()));
        out << "artifact,config_hash\n";
        for (const std::string& a : artifacts) out << a << "," << hash << "\n";
    }
};

DatasetMeta meta_from(const RunConfig& cfg) {
    DatasetMeta meta;
    meta.n_lanes = cfg.get_int("data.n_lanes");
    meta.lane_width = cfg.get_double("data.lane_width");
    meta.frame_rate = cfg.get_double("data.frame_rate");
    return meta;
}

// Some keys document constants that are compiled into the observation and
// dynamics code; overriding them would silently lie, so reject mismatches.
void check_fixed_key(const RunConfig& cfg, const char* key, double compiled) {
    if (cfg.get_double(key) != compiled)
        throw Error(ErrCode::Config, std::string(key) + " is fixed at " +
                                         std::to_string(compiled) + " in this build");
}

void check_architecture_keys(const RunConfig& cfg) {
    check_fixed_key(cfg, "grid.rows", GridSpec::kRows);
    check_fixed_key(cfg, "grid.cols", GridSpec::kCols);
    check_fixed_key(cfg, "grid.past_channels", GridSpec::kPast);
    check_fixed_key(cfg, "grid.future_channels", GridSpec::kFuture);
    check_fixed_key(cfg, "grid.cell_length", GridSpec::kCellLength);
    check_fixed_key(cfg, "grid.horizon", GridSpec::kFuture);
    check_fixed_key(cfg, "mnn.history", GridSpec::kPast);
    check_fixed_key(cfg, "sim.dt", kStepSeconds);
    check_fixed_key(cfg, "sim.sensor_range", kSensorRangeFt);
}

FrameIndex load_input(const RunConfig& cfg, const std::string& key = "data.input") {
    const std::string path = cfg.get_string(key);
    if (path.empty()) throw Error(ErrCode::Config, "key " + key + " is empty; no dataset given");
    return ingest_csv(path, meta_from(cfg));
}

RewardConfig reward_from(const RunConfig& cfg) {
    RewardConfig r;
    r.c1 = cfg.get_double("reward.c1");
    r.c2 = cfg.get_double("reward.c2");
    r.k1 = cfg.get_double("reward.k1");
    r.k2 = cfg.get_double("reward.k2");
    r.vehicle_length = cfg.get_double("reward.l");
    r.d1 = cfg.get_double("reward.d1");
    r.d2 = cfg.get_double("reward.d2");
    r.lane_width = cfg.get_double("data.lane_width");
    r.n_lanes = cfg.get_int("data.n_lanes");
    r.imit_x_weight = cfg.get_double("reward.imit.x_weight");
    r.imit_y_weight = cfg.get_double("reward.imit.y_weight");
    r.imit_scale = cfg.get_double("reward.imit.scale");
    return r;
}

ControlTable controls_from(const RunConfig& cfg) {
    ControlTable t;
    t.dv_accelerate = cfg.get_double("control.dv.accelerate");
    t.dv_cruise = cfg.get_double("control.dv.cruise");
    t.dv_decelerate = cfg.get_double("control.dv.decelerate");
    t.dv_brake = cfg.get_double("control.dv.brake");
    t.dphi_hard = cfg.get_double("control.dphi.hard");
    t.dphi_soft = cfg.get_double("control.dphi.soft");
    return t;
}

SynthConfig synth_from(const RunConfig& cfg) {
    SynthConfig s;
    s.vehicles = cfg.get_int("synth.vehicles");
    s.frames = cfg.get_int("synth.frames");
    s.n_lanes = cfg.get_int("data.n_lanes");
    s.lane_width = cfg.get_double("data.lane_width");
    s.speed_mean = cfg.get_double("synth.speed_mean");
    s.speed_jitter = cfg.get_double("synth.speed_jitter");
    s.lane_change_rate = cfg.get_double("synth.lane_change_rate");
    s.brake_rate = cfg.get_double("synth.brake_rate");
    s.spacing = cfg.get_double("synth.spacing");
    s.seed = uint64_t(cfg.get_long("seed"));
    return s;
}

// resolve a checkpoint path: explicit key, else the default file in out.dir
std::string checkpoint_path(const CommandContext& ctx, const std::string& key,
                            const std::string& default_name, bool must_exist) {
    const std::string p = ctx.cfg.get_string_or(key, ctx.path(default_name));
    if (must_exist && !fs::exists(p))
        throw Error(ErrCode::Dependency, "missing checkpoint file " + p + " (key " + key + ")");
    return p;
}

std::vector<ImitationSample> build_imitation_dataset(const FrameIndex& idx, const MnnParams& mnn,
                                                     int max_per_vehicle) {
    std::vector<ImitationSample> samples;
    for (const auto& [vid, track] : idx.tracks) {
        int taken = 0;
        for (const auto& p : track.points) {
            if (!labelable(track, p.frame_id)) continue;
            if (max_per_vehicle > 0 && taken >= max_per_vehicle) break;
            ImitationSample s;
            s.grid = observation_for_recorded(idx, track, p.frame_id, mnn);
            s.label = ManeuverLabel{label_lateral(track, p.frame_id),
                                    label_longitudinal(track, p.frame_id)};
            samples.push_back(std::move(s));
            ++taken;
        }
    }
    if (samples.empty()) throw Error(ErrCode::Data, "no labelable samples for imitation training");
    return samples;
}

void cmd_synth(CommandContext& ctx) {
    const FrameIndex idx = synth_generate(synth_from(ctx.cfg));
    const std::string out = ctx.path("synth.csv");
    write_csv(idx, out);
    ctx.made(out);
}

void cmd_ingest(CommandContext& ctx) {
    const FrameIndex idx = load_input(ctx.cfg);
    const std::string cache = ctx.path("framecache.csv");
    write_csv(idx, cache);
    ctx.made(cache);

    const std::string summary = ctx.path("ingest_summary.csv");
    std::ofstream out(summary);
    if (!out) throw Error(ErrCode::Io, "cannot write " + summary);
    out << "vehicles,frames,rows_dropped,tracks_dropped,speed_p75_ftps\n";
    out << idx.vehicle_count() << "," << idx.frame_count() << "," << idx.rows_dropped << ","
        << idx.tracks_dropped << "," << idx.speed_p75 << "\n";
    ctx.made(summary);
}

void cmd_label_stats(CommandContext& ctx) {
    const FrameIndex idx = load_input(ctx.cfg);
    const LabelStats stats = label_distribution(idx);
    const std::string out = ctx.path("label_stats.csv");
    write_label_stats_csv(stats, out);
    ctx.made(out);
}

void cmd_train_mnn(CommandContext& ctx) {
    check_architecture_keys(ctx.cfg);
    const FrameIndex idx = load_input(ctx.cfg);
    MnnTrainConfig tc;
    tc.hidden = ctx.cfg.get_int("mnn.hidden");
    tc.epochs = ctx.cfg.get_int("mnn.epochs");
    tc.learning_rate = ctx.cfg.get_double("mnn.learning_rate");
    tc.seed = uint64_t(ctx.cfg.get_long("seed"));
    const MnnTrainResult result = mnn_train(idx, tc);

    const std::string ckpt = ctx.path("mnn.ckpt");
    mnn_save(result.params, ckpt);
    ctx.made(ckpt);

    const std::string log = ctx.path("mnn_log.csv");
    std::ofstream out(log);
    if (!out) throw Error(ErrCode::Io, "cannot write " + log);
    out << "epoch,rmse\n";
    char buf[64];
    for (size_t e = 0; e < result.epoch_rmse.size(); ++e) {
        std::snprintf(buf, sizeof(buf), "%zu,%.9f\n", e + 1, result.epoch_rmse[e]);
        out << buf;
    }
    ctx.made(log);
}

void cmd_train_imitation(CommandContext& ctx) {
    check_architecture_keys(ctx.cfg);
    const FrameIndex idx = load_input(ctx.cfg);
    const MnnParams mnn =
        mnn_load(checkpoint_path(ctx, "imitation.mnn_checkpoint", "mnn.ckpt", true));

    const auto dataset = build_imitation_dataset(
        idx, mnn, ctx.cfg.get_int("imitation.max_samples_per_vehicle"));

    ImitationTrainConfig tc;
    tc.epochs = ctx.cfg.get_int("imitation.epochs");
    tc.batch_size = ctx.cfg.get_int("imitation.batch_size");
    tc.learning_rate = ctx.cfg.get_double("imitation.learning_rate");
    tc.grad_clip = ctx.cfg.get_double("imitation.grad_clip");
    tc.cruise_keep_every = ctx.cfg.get_int("imitation.cruise_keep_every");
    tc.seed = uint64_t(ctx.cfg.get_long("seed"));
    ImitationTrainResult result = train_imitation(dataset, tc);

    const std::string enc_path = ctx.path("encoder.ckpt");
    encoder_save(result.model.encoder, enc_path);
    ctx.made(enc_path);
    const std::string heads_path = ctx.path("imitation_heads.ckpt");
    heads_save(result.model.heads, heads_path);
    ctx.made(heads_path);

    const std::string log = ctx.path("imitation_log.csv");
    std::ofstream out(log);
    if (!out) throw Error(ErrCode::Io, "cannot write " + log);
    out << "epoch,mean_bce\n";
    char buf[64];
    for (size_t e = 0; e < result.epoch_loss.size(); ++e) {
        std::snprintf(buf, sizeof(buf), "%zu,%.9f\n", e + 1, result.epoch_loss[e]);
        out << buf;
    }
    ctx.made(log);
}

void cmd_train_drl(CommandContext& ctx) {
    check_architecture_keys(ctx.cfg);
    const MnnParams mnn = mnn_load(checkpoint_path(ctx, "drl.mnn_checkpoint", "mnn.ckpt", true));
    const Encoder encoder =
        encoder_load(checkpoint_path(ctx, "drl.encoder_checkpoint", "encoder.ckpt", true));

    std::vector<std::string> paths = ctx.cfg.get_list("drl.datasets");
    if (paths.empty()) {
        const std::string single = ctx.cfg.get_string("data.input");
        if (single.empty())
            throw Error(ErrCode::Config, "key drl.datasets is empty; no training datasets given");
        paths.push_back(single);
    }

    std::vector<FrameIndex> indices;
    indices.reserve(paths.size());
    std::vector<DrlDataset> datasets;
    for (const std::string& p : paths) indices.push_back(ingest_csv(p, meta_from(ctx.cfg)));
    for (size_t i = 0; i < paths.size(); ++i) {
        DrlDataset ds;
        ds.name = fs::path(paths[i]).stem().string();
        ds.data = &indices[i];
        datasets.push_back(ds);
    }

    const RewardConfig reward_cfg = reward_from(ctx.cfg);
    const ControlTable controls = controls_from(ctx.cfg);
    EnvFactory factory = [&](const DrlDataset& ds) {
        return std::make_unique<SimEnv>(*ds.data, mnn, reward_cfg, controls);
    };

    DrlTrainConfig tc;
    tc.gamma = ctx.cfg.get_double("drl.gamma");
    tc.epsilon_start = ctx.cfg.get_double("drl.epsilon_start");
    tc.epsilon_end = ctx.cfg.get_double("drl.epsilon_end");
    tc.batch_size = ctx.cfg.get_int("drl.batch_size");
    tc.buffer_capacity = size_t(ctx.cfg.get_long("drl.buffer_capacity"));
    tc.target_sync_every = ctx.cfg.get_int("drl.target_sync_every");
    tc.learning_rate = ctx.cfg.get_double("drl.learning_rate");
    tc.grad_clip = ctx.cfg.get_double("drl.grad_clip");
    tc.huber_delta = ctx.cfg.get_double("drl.huber_delta");
    tc.cruise_keep_every = ctx.cfg.get_int("drl.cruise_keep_every");
    tc.updates_per_step = ctx.cfg.get_int("drl.updates_per_step");
    tc.episodes_per_dataset = ctx.cfg.get_int("drl.episodes_per_dataset");
    tc.conventional_ddqn = ctx.cfg.get_bool("drl.conventional_ddqn");
    tc.seed = uint64_t(ctx.cfg.get_long("seed"));
    tc.checkpoint_dir = ctx.out_dir;
    tc.log_path = ctx.path("drl_log.csv");
    tc.log_window = ctx.cfg.get_int("drl.log_window");

    DrlTrainResult result = train_drl(factory, datasets, encoder, tc);
    for (const std::string& c : result.checkpoints) ctx.made(c);
    ctx.made(tc.log_path);

    const std::string final_path = ctx.path("qnets.ckpt");
    qnets_save(result.qnets, final_path);
    ctx.made(final_path);
}

void cmd_evaluate(CommandContext& ctx) {
    check_architecture_keys(ctx.cfg);
    const FrameIndex idx = load_input(ctx.cfg);
    const std::string dataset_name = fs::path(ctx.cfg.get_string("data.input")).stem().string();
    const RewardConfig reward_cfg = reward_from(ctx.cfg);
    const ControlTable controls = controls_from(ctx.cfg);
    const uint64_t seed = uint64_t(ctx.cfg.get_long("seed"));
    const int workers = ctx.cfg.get_int("workers");

    const std::vector<std::string> policies = ctx.cfg.get_list("eval.policies");
    const MnnParams mnn =
        mnn_load(checkpoint_path(ctx, "eval.mnn_checkpoint", "mnn.ckpt", true));

    std::vector<MetricsReport> reports;
    for (const std::string& name : policies) {
        EvalResult result;
        if (name == "rule") {
            result = evaluate_policy(name, make_rule_policy(), dataset_name, idx, mnn, reward_cfg,
                                     controls, seed, workers);
        } else if (name == "random") {
            result = evaluate_policy(name, make_random_policy(), dataset_name, idx, mnn,
                                     reward_cfg, controls, seed, workers);
        } else if (name == "imitation") {
            auto model = std::make_shared<ImitationModel>();
            model->encoder = encoder_load(
                checkpoint_path(ctx, "eval.encoder_checkpoint", "encoder.ckpt", true));
            model->heads =
                heads_load(checkpoint_path(ctx, "eval.heads_checkpoint", "imitation_heads.ckpt",
                                           true));
            result = evaluate_policy(name, make_imitation_policy(model), dataset_name, idx, mnn,
                                     reward_cfg, controls, seed, workers);
        } else if (name == "pmp-drl") {
            auto encoder = std::make_shared<Encoder>(encoder_load(
                checkpoint_path(ctx, "eval.encoder_checkpoint", "encoder.ckpt", true)));
            auto qnets = qnets_load(
                checkpoint_path(ctx, "eval.qnets_checkpoint", "qnets.ckpt", true));
            auto qnet = std::make_shared<QNet>(std::move(qnets.primary));
            result = evaluate_policy(name, make_drl_policy(encoder, qnet), dataset_name, idx, mnn,
                                     reward_cfg, controls, seed, workers);
        } else if (name == "dataset") {
            result = evaluate_recorded(dataset_name, idx, reward_cfg);
        } else {
            throw Error(ErrCode::Config, "unknown policy '" + name + "' in eval.policies");
        }
        reports.insert(reports.end(), result.reports.begin(), result.reports.end());

        const std::string plot = ctx.path("episodes_" + name + ".csv");
        write_episode_metrics_csv(result.episodes, plot);
        ctx.made(plot);
    }

    const std::string report_path = ctx.path("report.csv");
    write_reports_csv(reports, report_path);
    ctx.made(report_path);
}

void cmd_replay_render(CommandContext& ctx) {
    check_architecture_keys(ctx.cfg);
    const FrameIndex idx = load_input(ctx.cfg);
    const MnnParams mnn = mnn_load(checkpoint_path(ctx, "eval.mnn_checkpoint", "mnn.ckpt", true));
    const RewardConfig reward_cfg = reward_from(ctx.cfg);
    const ControlTable controls = controls_from(ctx.cfg);

    SimEnv env(idx, mnn, reward_cfg, controls);
    int vid = ctx.cfg.get_int("replay.vehicle");
    if (vid == 0) {
        const auto vehicles = env.episode_vehicles();
        if (vehicles.empty()) throw Error(ErrCode::Data, "dataset has no usable episodes");
        vid = vehicles.front();
    }

    const std::string policy_name = ctx.cfg.get_string("replay.policy");
    Policy policy;
    if (policy_name == "rule") {
        policy = make_rule_policy();
    } else if (policy_name == "random") {
        policy = make_random_policy();
    } else if (policy_name == "imitation") {
        auto model = std::make_shared<ImitationModel>();
        model->encoder =
            encoder_load(checkpoint_path(ctx, "eval.encoder_checkpoint", "encoder.ckpt", true));
        model->heads = heads_load(
            checkpoint_path(ctx, "eval.heads_checkpoint", "imitation_heads.ckpt", true));
        policy = make_imitation_policy(model);
    } else if (policy_name == "pmp-drl") {
        auto encoder = std::make_shared<Encoder>(
            encoder_load(checkpoint_path(ctx, "eval.encoder_checkpoint", "encoder.ckpt", true)));
        auto qnets =
            qnets_load(checkpoint_path(ctx, "eval.qnets_checkpoint", "qnets.ckpt", true));
        auto qnet = std::make_shared<QNet>(std::move(qnets.primary));
        policy = make_drl_policy(encoder, qnet);
    } else {
        throw Error(ErrCode::Config, "unknown replay.policy '" + policy_name + "'");
    }

    Rng rng(uint64_t(ctx.cfg.get_long("seed")));
    ContextGrid obs = env.reset(vid);
    bool done = false;
    while (!done) {
        PolicyContext pctx{&obs, &env, &rng};
        StepResult res = env.step(policy(pctx));
        obs = std::move(res.observation);
        done = res.done;
    }

    const std::string trace = ctx.path("trace_" + std::to_string(vid) + ".csv");
    env.write_trace_csv(trace);
    ctx.made(trace);

    // per-step plot series (velocity and reward over time)
    const std::string plot = ctx.path("trace_plot_" + std::to_string(vid) + ".csv");
    std::ofstream out(plot);
    if (!out) throw Error(ErrCode::Io, "cannot write " + plot);
    out << "step,frame,ego_v_ftps,reward_total\n";
    char buf[128];
    int step = 0;
    for (const SimEnv::TraceRow& row : env.trace()) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%.6f,%.6f\n", step++, row.frame, row.ego.v,
                      row.reward.total);
        out << buf;
    }
    ctx.made(plot);
}

}  // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> kNames = {
        "synth",          "ingest",    "label-stats",  "train-mnn",
        "train-imitation", "train-drl", "evaluate",     "replay-render",
    };
    return kNames;
}

std::vector<std::string> run_command(const std::string& command, const RunConfig& cfg) {
    CommandContext ctx(cfg);
    if (command == "synth")
        cmd_synth(ctx);
    else if (command == "ingest")
        cmd_ingest(ctx);
    else if (command == "label-stats")
        cmd_label_stats(ctx);
    else if (command == "train-mnn")
        cmd_train_mnn(ctx);
    else if (command == "train-imitation")
        cmd_train_imitation(ctx);
    else if (command == "train-drl")
        cmd_train_drl(ctx);
    else if (command == "evaluate")
        cmd_evaluate(ctx);
    else if (command == "replay-render")
        cmd_replay_render(ctx);
    else
        throw Error(ErrCode::Usage, "unknown command '" + command + "'");
    ctx.write_manifest();
    return ctx.artifacts;
}

}  // namespace pmp
