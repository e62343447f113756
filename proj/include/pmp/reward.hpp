#pragma once

#include <array>
#include <string>
#include <vector>

#include "pmp/error.hpp"

namespace pmp {

struct RewardConfig {
    double c1 = 5.0;
    double c2 = 125.0;
    double k1 = 2.0;
    double k2 = -6.0;
    double vehicle_length = 15.0;  // l, ft
    double d1 = 16.0;              // ft
    double d2 = 25.0;              // ft
    double lane_width = 12.0;      // ft
    int n_lanes = 5;
    double imit_x_weight = 0.25;
    double imit_y_weight = 0.1;
    double imit_scale = -0.5;
};

// Region of one surrounding vehicle relative to the (projected) ego position.
// The two negative regions double as the near-collision predicate.
enum class RewardRegion { P1, P2, P3, NegativeLateral, NegativeRadial };

RewardRegion classify_region(double dx, double dy, const RewardConfig& cfg);

inline bool is_negative_region(RewardRegion r) {
    return r == RewardRegion::NegativeLateral || r == RewardRegion::NegativeRadial;
}

struct RewardBreakdown {
    double r_dis = 0.0;
    double r_imit = 0.0;
    double r_offroad = 0.0;
    double total = 0.0;
    int p1 = 0;
    int p2 = 0;
    int p3 = 0;
    int n_count = 0;
    int p_count = 0;
};

using Position = std::array<double, 2>;  // (x, y) ft

// Distance-based component: positive contributions averaged over the vehicles
// in P regions (only the first P1 vehicle pays out), negative contributions
// scaled by k1. An all-negative scene has no positive term.
RewardBreakdown distance_reward(const Position& ego_pred,
                                const std::vector<Position>& surrounding,
                                const RewardConfig& cfg);

double imitation_reward(const Position& ego_pred, const Position& ego_actual,
                        const RewardConfig& cfg);

double offroad_reward(double ego_pred_x, const RewardConfig& cfg);

RewardBreakdown total_reward(const Position& ego_pred, const Position& ego_actual,
                             const std::vector<Position>& surrounding, const RewardConfig& cfg);

// Scene-file line: ego_pred_x ego_pred_y ego_act_x ego_act_y n x1 y1 ... xn yn
struct RewardScene {
    Position ego_pred{0.0, 0.0};
    Position ego_actual{0.0, 0.0};
    std::vector<Position> surrounding;
};

RewardScene parse_scene_line(const std::string& line);

}  // namespace pmp
