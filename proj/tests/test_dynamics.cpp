#include "doctest.h"

#include <array>
#include <cmath>
#include <vector>

#include "pmp/dynamics.hpp"
#include "pmp/rng.hpp"

using namespace pmp;

TEST_CASE("action_to_control: table entries and sign convention") {
    const ControlDelta idle = action_to_control({Lateral::SameLane, Longitudinal::Cruise});
    CHECK(idle.dv == 0.0);
    CHECK(idle.dphi == 0.0);

    // left turns carry negative dphi (lane index decreases to the left)
    const ControlDelta sl = action_to_control({Lateral::SoftLeft, Longitudinal::Accelerate});
    CHECK(sl.dv == 0.5);
    CHECK(sl.dphi == -0.01);

    const ControlDelta hb = action_to_control({Lateral::HardRight, Longitudinal::Brake});
    CHECK(hb.dv == -1.5);
    CHECK(hb.dphi == 0.04);

    ControlTable custom;
    custom.dv_brake = -3.0;
    custom.dphi_hard = 0.1;
    const ControlDelta c = action_to_control({Lateral::HardLeft, Longitudinal::Brake}, custom);
    CHECK(c.dv == -3.0);
    CHECK(c.dphi == -0.1);
}

TEST_CASE("estimate_state: finite differences and atan2 heading") {
    const EgoState a = estimate_state(0, 0, 0, 1.5, 0.1);
    CHECK(a.v == doctest::Approx(15.0));
    CHECK(a.phi == 0.0);

    const EgoState b = estimate_state(3, 7, 3, 7, 0.1);
    CHECK(b.v == 0.0);
    CHECK(b.phi == 0.0);

    const EgoState c = estimate_state(0, 0, 1.5, 0, 0.1);
    CHECK(c.v == doctest::Approx(15.0));
    CHECK(c.phi == doctest::Approx(M_PI / 2));

    CHECK_THROWS_AS(estimate_state(0, 0, 1, 1, 0.0), Error);
}

TEST_CASE("step_unicycle: straight, curved, and clamped steps") {
    const EgoState s{10.0, 100.0, 15.0, 0.0};

    const EgoState straight = step_unicycle(s, {0.0, 0.0}, 0.1);
    CHECK(straight.x == 10.0);
    CHECK(straight.y == doctest::Approx(101.5));
    CHECK(straight.v == 15.0);
    CHECK(straight.phi == 0.0);

    const EgoState curved = step_unicycle(s, {0.5, 0.01}, 0.1);
    CHECK(curved.x - s.x == doctest::Approx(15.5 * std::sin(0.01) * 0.1).epsilon(1e-12));
    CHECK(curved.y - s.y == doctest::Approx(15.5 * std::cos(0.01) * 0.1).epsilon(1e-12));
    CHECK(curved.x - s.x == doctest::Approx(0.015500).epsilon(1e-4));
    CHECK(curved.y - s.y == doctest::Approx(1.5499225).epsilon(1e-6));

    const EgoState clamped = step_unicycle({0, 0, 1.0, 0}, {-1.5, 0.0}, 0.1);
    CHECK(clamped.v == 0.0);
    CHECK(clamped.x == 0.0);
    CHECK(clamped.y == 0.0);
}

TEST_CASE("property: zero control traces an exact straight line") {
    EgoState s{3.0, 5.0, 12.5, 0.0};
    for (int n = 0; n < 200; ++n) {
        const EgoState next = step_unicycle(s, {0.0, 0.0}, 0.1);
        const double dist = std::hypot(next.x - s.x, next.y - s.y);
        CHECK(dist == doctest::Approx(12.5 * 0.1).epsilon(1e-12));
        CHECK(next.v == 12.5);
        CHECK(next.phi == 0.0);
        CHECK(next.x == 3.0);
        s = next;
    }
}

TEST_CASE("property: constant dphi traces a circle of radius ~ v dt / dphi") {
    const double dphi = 0.01, v = 15.0, dt = 0.1;
    EgoState s{0.0, 0.0, v, 0.0};
    std::vector<std::array<double, 2>> pts;
    for (int n = 0; n < 100; ++n) {
        s = step_unicycle(s, {0.0, dphi}, dt);
        pts.push_back({s.x, s.y});
    }
    CHECK(s.phi == doctest::Approx(100 * dphi).epsilon(1e-12));

    // the discrete trace lies on the circle of radius v dt / (2 sin(dphi/2))
    // centered at (R cos(dphi/2), -R sin(dphi/2)); that radius is within 1%
    // of the analytic v dt / dphi
    const double expected_r = v * dt / dphi;
    const double r_exact = v * dt / (2.0 * std::sin(dphi / 2.0));
    const double cx = r_exact * std::cos(dphi / 2.0);
    const double cy = -r_exact * std::sin(dphi / 2.0);
    for (const auto& p : pts) {
        const double r = std::hypot(p[0] - cx, p[1] - cy);
        CHECK(r == doctest::Approx(expected_r).epsilon(0.01));
    }
}

TEST_CASE("property: speed never goes negative under any action sequence") {
    Rng rng(99);
    EgoState s{0, 0, 2.0, 0};
    for (int n = 0; n < 500; ++n) {
        const MetaAction a{lateral_from_index(rng.uniform_int(kNumLateral)),
                           longitudinal_from_index(rng.uniform_int(kNumLongitudinal))};
        s = step_unicycle(s, action_to_control(a), 0.1);
        CHECK(s.v >= 0.0);
    }
}
