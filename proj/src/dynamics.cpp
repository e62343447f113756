#include "pmp/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace pmp {

ControlDelta action_to_control(const MetaAction& a, const ControlTable& table) {
    ControlDelta u;
    switch (a.lon) {
        case Longitudinal::Accelerate: u.dv = table.dv_accelerate; break;
        case Longitudinal::Cruise: u.dv = table.dv_cruise; break;
        case Longitudinal::Decelerate: u.dv = table.dv_decelerate; break;
        case Longitudinal::Brake: u.dv = table.dv_brake; break;
    }
    switch (a.lat) {
        case Lateral::HardLeft: u.dphi = -table.dphi_hard; break;
        case Lateral::SoftLeft: u.dphi = -table.dphi_soft; break;
        case Lateral::SameLane: u.dphi = 0.0; break;
        case Lateral::SoftRight: u.dphi = table.dphi_soft; break;
        case Lateral::HardRight: u.dphi = table.dphi_hard; break;
    }
    return u;
}

EgoState estimate_state(double prev_x, double prev_y, double cur_x, double cur_y, double dt) {
    if (dt <= 0.0) throw Error(ErrCode::Domain, "dt must be positive");
    const double vx = (cur_x - prev_x) / dt;
    const double vy = (cur_y - prev_y) / dt;
    EgoState s;
    s.x = cur_x;
    s.y = cur_y;
    s.v = std::sqrt(vx * vx + vy * vy);
    // atan2 instead of atan so a zero longitudinal difference stays defined;
    // stationary points get phi = 0 by convention
    s.phi = (vx == 0.0 && vy == 0.0) ? 0.0 : std::atan2(cur_x - prev_x, cur_y - prev_y);
    return s;
}

EgoState step_unicycle(const EgoState& s, const ControlDelta& u, double dt) {
    if (dt <= 0.0) throw Error(ErrCode::Domain, "dt must be positive");
    EgoState next;
    next.v = std::max(0.0, s.v + u.dv);
    next.phi = s.phi + u.dphi;
    next.x = s.x + next.v * std::sin(next.phi) * dt;
    next.y = s.y + next.v * std::cos(next.phi) * dt;
    return next;
}

}  // namespace pmp
