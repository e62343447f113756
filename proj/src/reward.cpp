#include "pmp/reward.hpp"

#include <cmath>
#include <sstream>

namespace pmp {

RewardRegion classify_region(double dx, double dy, const RewardConfig& cfg) {
    const double half_l = 0.5 * cfg.vehicle_length;
    const double ax = std::abs(dx);
    const double ay = std::abs(dy);
    if (ay <= half_l) return (ax >= half_l) ? RewardRegion::P1 : RewardRegion::NegativeLateral;
    const double d = std::sqrt(dx * dx + dy * dy);
    if (d <= cfg.d1 && ax <= half_l) return RewardRegion::NegativeRadial;
    if (d <= cfg.d2) return RewardRegion::P2;
    return RewardRegion::P3;
}

RewardBreakdown distance_reward(const Position& ego_pred,
                                const std::vector<Position>& surrounding,
                                const RewardConfig& cfg) {
    const double half_l = 0.5 * cfg.vehicle_length;
    RewardBreakdown b;
    double r_pos = 0.0, r_neg = 0.0;
    for (const Position& s : surrounding) {
        const double dx = ego_pred[0] - s[0];
        const double dy = ego_pred[1] - s[1];
        const double d = std::sqrt(dx * dx + dy * dy);
        switch (classify_region(dx, dy, cfg)) {
            case RewardRegion::P1:
                ++b.p1;
                ++b.p_count;
                // only the first alongside vehicle pays out
                if (b.p1 <= 1) r_pos += cfg.c1 * std::tanh(std::abs(dx) - half_l);
                break;
            case RewardRegion::NegativeLateral:
                ++b.n_count;
                r_neg += cfg.c1 * std::tanh(std::abs(dx) - half_l);
                break;
            case RewardRegion::NegativeRadial:
                ++b.n_count;
                r_neg += cfg.c1 * std::tanh(d - cfg.d1);
                break;
            case RewardRegion::P2:
                ++b.p2;
                ++b.p_count;
                r_pos += d / cfg.c1;
                break;
            case RewardRegion::P3:
                ++b.p3;
                ++b.p_count;
                r_pos += cfg.c2 / d;
                break;
        }
    }
    const double positive_term = (b.p_count > 0) ? r_pos / double(b.p_count) : 0.0;
    b.r_dis = positive_term + cfg.k1 * r_neg;
    return b;
}

double imitation_reward(const Position& ego_pred, const Position& ego_actual,
                        const RewardConfig& cfg) {
    const double x_err = ego_pred[0] - ego_actual[0];
    const double y_err = ego_pred[1] - ego_actual[1];
    return cfg.imit_scale *
           (cfg.imit_x_weight * std::abs(x_err) + cfg.imit_y_weight * std::abs(y_err));
}

double offroad_reward(double ego_pred_x, const RewardConfig& cfg) {
    const double road_width = double(cfg.n_lanes) * cfg.lane_width;
    return (ego_pred_x <= 0.0 || ego_pred_x >= road_width) ? cfg.k2 : 0.0;
}

RewardBreakdown total_reward(const Position& ego_pred, const Position& ego_actual,
                             const std::vector<Position>& surrounding, const RewardConfig& cfg) {
    RewardBreakdown b = distance_reward(ego_pred, surrounding, cfg);
    b.r_imit = imitation_reward(ego_pred, ego_actual, cfg);
    b.r_offroad = offroad_reward(ego_pred[0], cfg);
    b.total = b.r_dis + b.r_imit + b.r_offroad;
    return b;
}

RewardScene parse_scene_line(const std::string& line) {
    std::istringstream in(line);
    RewardScene scene;
    int n = 0;
    if (!(in >> scene.ego_pred[0] >> scene.ego_pred[1] >> scene.ego_actual[0] >>
          scene.ego_actual[1] >> n) ||
        n < 0)
        throw Error(ErrCode::Data, "malformed scene line: " + line);
    scene.surrounding.resize(size_t(n));
    for (int i = 0; i < n; ++i)
        if (!(in >> scene.surrounding[size_t(i)][0] >> scene.surrounding[size_t(i)][1]))
            throw Error(ErrCode::Data, "scene line truncated: " + line);
    return scene;
}

}  // namespace pmp
