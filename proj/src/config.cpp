#include "pmp/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace pmp {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace

const std::map<std::string, std::string>& RunConfig::defaults() {
    static const std::map<std::string, std::string> kDefaults = {
        {"seed", "12345"},
        {"out.dir", "out"},
        {"workers", "1"},

        {"data.input", ""},
        {"data.n_lanes", "5"},
        {"data.lane_width", "12"},
        {"data.frame_rate", "10"},

        {"sim.dt", "0.1"},
        {"sim.sensor_range", "90"},

        {"grid.rows", "13"},
        {"grid.cols", "3"},
        {"grid.past_channels", "30"},
        {"grid.future_channels", "30"},
        {"grid.cell_length", "15"},
        {"grid.horizon", "30"},

        {"control.dv.accelerate", "0.5"},
        {"control.dv.cruise", "0"},
        {"control.dv.decelerate", "-0.5"},
        {"control.dv.brake", "-1.5"},
        {"control.dphi.hard", "0.04"},
        {"control.dphi.soft", "0.01"},

        {"reward.c1", "5"},
        {"reward.c2", "125"},
        {"reward.k1", "2"},
        {"reward.k2", "-6"},
        {"reward.l", "15"},
        {"reward.d1", "16"},
        {"reward.d2", "25"},
        {"reward.imit.x_weight", "0.25"},
        {"reward.imit.y_weight", "0.1"},
        {"reward.imit.scale", "-0.5"},

        {"mnn.hidden", "24"},
        {"mnn.history", "30"},
        {"mnn.epochs", "60"},
        {"mnn.learning_rate", "0.01"},

        {"imitation.epochs", "30"},
        {"imitation.batch_size", "32"},
        {"imitation.learning_rate", "0.001"},
        {"imitation.grad_clip", "10"},
        {"imitation.cruise_keep_every", "5"},
        {"imitation.mnn_checkpoint", ""},
        {"imitation.max_samples_per_vehicle", "0"},

        {"drl.gamma", "0.99"},
        {"drl.epsilon_start", "1.0"},
        {"drl.epsilon_end", "0.05"},
        {"drl.batch_size", "32"},
        {"drl.buffer_capacity", "100000"},
        {"drl.target_sync_every", "1000"},
        {"drl.learning_rate", "0.0001"},
        {"drl.grad_clip", "10"},
        {"drl.huber_delta", "1"},
        {"drl.cruise_keep_every", "2"},
        {"drl.updates_per_step", "1"},
        {"drl.episodes_per_dataset", "0"},
        {"drl.conventional_ddqn", "false"},
        {"drl.datasets", ""},
        {"drl.encoder_checkpoint", ""},
        {"drl.mnn_checkpoint", ""},
        {"drl.log_window", "500"},

        {"eval.policies", "rule,imitation,pmp-drl,dataset"},
        {"eval.encoder_checkpoint", ""},
        {"eval.heads_checkpoint", ""},
        {"eval.qnets_checkpoint", ""},
        {"eval.mnn_checkpoint", ""},

        {"replay.vehicle", "0"},
        {"replay.policy", "rule"},

        {"synth.vehicles", "10"},
        {"synth.frames", "200"},
        {"synth.speed_mean", "15"},
        {"synth.speed_jitter", "0"},
        {"synth.lane_change_rate", "0"},
        {"synth.brake_rate", "0"},
        {"synth.spacing", "120"},
    };
    return kDefaults;
}

RunConfig::RunConfig() = default;

void RunConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrCode::Config, "cannot open config file " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw Error(ErrCode::Config,
                        path + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw Error(ErrCode::Config, path + ":" + std::to_string(lineno) + ": empty key");
        if (!defaults().count(key))
            throw Error(ErrCode::Config,
                        path + ":" + std::to_string(lineno) + ": unknown key " + key);
        file_[key] = value;
    }
}

void RunConfig::set(const std::string& key, const std::string& value) {
    if (!defaults().count(key)) throw Error(ErrCode::Config, "unknown config key " + key);
    overrides_[key] = value;
}

bool RunConfig::has(const std::string& key) const { return defaults().count(key) > 0; }

std::string RunConfig::get_string(const std::string& key) const {
    if (auto it = overrides_.find(key); it != overrides_.end()) return it->second;
    if (auto it = file_.find(key); it != file_.end()) return it->second;
    if (auto it = defaults().find(key); it != defaults().end()) return it->second;
    throw Error(ErrCode::Config, "unknown config key " + key);
}

std::string RunConfig::get_string_or(const std::string& key, const std::string& fallback) const {
    const std::string v = get_string(key);
    return v.empty() ? fallback : v;
}

double RunConfig::get_double(const std::string& key) const {
    const std::string v = get_string(key);
    char* end = nullptr;
    const double d = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size() || !std::isfinite(d))
        throw Error(ErrCode::Config, "key " + key + " is not a number: '" + v + "'");
    return d;
}

long RunConfig::get_long(const std::string& key) const {
    const double d = get_double(key);
    if (d != std::floor(d)) throw Error(ErrCode::Config, "key " + key + " is not an integer");
    return long(d);
}

int RunConfig::get_int(const std::string& key) const { return int(get_long(key)); }

bool RunConfig::get_bool(const std::string& key) const {
    const std::string v = get_string(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw Error(ErrCode::Config, "key " + key + " is not a boolean: '" + v + "'");
}

std::vector<std::string> RunConfig::get_list(const std::string& key) const {
    std::vector<std::string> out;
    std::stringstream ss(get_string(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
        const std::string t = trim(item);
        if (!t.empty()) out.push_back(t);
    }
    return out;
}

std::map<std::string, std::string> RunConfig::effective() const {
    std::map<std::string, std::string> merged = defaults();
    for (const auto& [k, v] : file_) merged[k] = v;
    for (const auto& [k, v] : overrides_) merged[k] = v;
    return merged;
}

std::string RunConfig::canonical_text() const {
    std::string out;
    for (const auto& [k, v] : effective()) {
        out += k;
        out += " = ";
        out += v;
        out += '\n';
    }
    return out;
}

uint64_t RunConfig::hash() const {
    uint64_t h = 0xcbf29ce484222325ull;
    for (char c : canonical_text()) {
        h ^= uint64_t(uint8_t(c));
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace pmp
