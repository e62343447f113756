#pragma once

#include "pmp/actions.hpp"
#include "pmp/error.hpp"

namespace pmp {

constexpr double kStepSeconds = 0.1;

// Per-step control change realized by a meta-action.
struct ControlDelta {
    double dv = 0.0;    // ft/s per step
    double dphi = 0.0;  // rad per step; negative turns left (toward lower lane ids)
};

struct ControlTable {
    double dv_accelerate = 0.5;
    double dv_cruise = 0.0;
    double dv_decelerate = -0.5;
    double dv_brake = -1.5;
    double dphi_hard = 0.04;
    double dphi_soft = 0.01;
};

ControlDelta action_to_control(const MetaAction& a, const ControlTable& table = {});

// phi = 0 points along +y (direction of travel); x grows to the right.
struct EgoState {
    double x = 0.0;
    double y = 0.0;
    double v = 0.0;  // ft/s, never negative
    double phi = 0.0;
};

// Velocity and heading by finite differences over one interval.
EgoState estimate_state(double prev_x, double prev_y, double cur_x, double cur_y, double dt);

// Unicycle update: v and phi change first, then the position advances.
EgoState step_unicycle(const EgoState& s, const ControlDelta& u, double dt);

}  // namespace pmp
