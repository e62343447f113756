#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "pmp/grid.hpp"

using namespace pmp;

namespace {

std::vector<GridPose> stationary_ego(double x, double y, int lane) {
    return std::vector<GridPose>(size_t(GridSpec::kPast), GridPose{x, y, lane});
}

PredictionResult constant_prediction(double x, double y) {
    PredictionResult r;
    r.positions.assign(size_t(GridSpec::kFuture), {x, y});
    return r;
}

NeighborInput absent_neighbor(int vid) {
    NeighborInput nb;
    nb.vehicle_id = vid;
    nb.past.assign(size_t(GridSpec::kPast), std::nullopt);
    return nb;
}

}  // namespace

TEST_CASE("occupancy probability: pinned values, monotonicity, domain") {
    CHECK(occupancy_probability(0) == doctest::Approx(0.955798).epsilon(1e-6));
    CHECK(occupancy_probability(10) == doctest::Approx(0.912719).epsilon(1e-6));
    CHECK(occupancy_probability(30) == doctest::Approx(0.810588).epsilon(1e-6));
    for (int t = 1; t <= 30; ++t)
        CHECK(occupancy_probability(t) < occupancy_probability(t - 1));
    for (int t = 0; t <= 30; ++t) {
        CHECK(occupancy_probability(t) > 0.8);
        CHECK(occupancy_probability(t) < 0.96);
    }
    CHECK_THROWS_AS(occupancy_probability(-1), Error);
    CHECK_THROWS_AS(occupancy_probability(31), Error);
}

TEST_CASE("cell_index: ego cell, ahead-right, far-behind out of region") {
    const CellRef ego = cell_index(100.0, 3, 100.0, 3);
    CHECK(ego.in_region);
    CHECK(ego.row == 6);
    CHECK(ego.col == 1);

    const CellRef ahead = cell_index(100.0, 3, 130.0, 4);
    CHECK(ahead.in_region);
    CHECK(ahead.row == 4);
    CHECK(ahead.col == 2);

    CHECK_FALSE(cell_index(100.0, 3, 0.0, 3).in_region);   // 100 ft behind -> row 13
    CHECK_FALSE(cell_index(100.0, 3, 100.0, 5).in_region); // two lanes over
}

TEST_CASE("build_grid: empty scene stays all zero") {
    GridInputs in;
    in.ego_history = stationary_ego(30.0, 500.0, 3);
    const ContextGrid g = build_grid(in);
    for (double v : g.values) CHECK(v == 0.0);
}

TEST_CASE("build_grid: single POM deposit at horizon 1") {
    GridInputs in;
    in.ego_history = stationary_ego(30.0, 500.0, 3);
    NeighborInput nb = absent_neighbor(2);
    nb.prediction = constant_prediction(30.0, 530.0);  // 30 ft ahead, same lane
    in.neighbors.push_back(nb);
    const ContextGrid g = build_grid(in);

    const double p1 = 0.47 + std::sqrt(0.232);
    const double halo = (1.0 - p1) / 8.0;
    CHECK(g.at(4, 1, 30) == doctest::Approx(p1).epsilon(1e-12));
    for (int dr = -1; dr <= 1; ++dr)
        for (int dc = -1; dc <= 1; ++dc)
            if (dr || dc) CHECK(g.at(4 + dr, 1 + dc, 30) == doctest::Approx(halo).epsilon(1e-12));

    // past channels untouched, all other future channels have their own deposit
    for (int c = 0; c < GridSpec::kPast; ++c)
        for (int r = 0; r < GridSpec::kRows; ++r)
            for (int col = 0; col < GridSpec::kCols; ++col) CHECK(g.at(r, col, c) == 0.0);
}

TEST_CASE("build_grid: neighbor alongside for all 30 past frames") {
    GridInputs in;
    in.ego_history = stationary_ego(30.0, 500.0, 3);
    NeighborInput nb = absent_neighbor(2);
    for (auto& slot : nb.past) slot = GridPose{18.0, 500.0, 2};  // left lane, same y
    nb.prediction = constant_prediction(18.0, 500.0);
    in.neighbors.push_back(nb);
    const ContextGrid g = build_grid(in);

    for (int c = 0; c < GridSpec::kPast; ++c) {
        for (int r = 0; r < GridSpec::kRows; ++r)
            for (int col = 0; col < GridSpec::kCols; ++col) {
                if (r == 6 && col == 0)
                    CHECK(g.at(r, col, c) == 1.0);
                else
                    CHECK(g.at(r, col, c) == 0.0);
            }
    }
}

TEST_CASE("build_grid: missing prediction for an in-range neighbor is an error") {
    GridInputs in;
    in.ego_history = stationary_ego(30.0, 500.0, 3);
    NeighborInput nb = absent_neighbor(2);
    nb.prediction.positions.assign(7, {30.0, 510.0});  // too short
    in.neighbors.push_back(nb);
    CHECK_THROWS_WITH_AS(build_grid(in), doctest::Contains("prediction"), Error);
}

TEST_CASE("build_grid: per-vehicle in-bounds POM mass sums to 1") {
    Rng rng(2024);
    for (int it = 0; it < 1000; ++it) {
        GridInputs in;
        in.ego_history = stationary_ego(30.0, 500.0, 3);
        NeighborInput nb = absent_neighbor(2);
        // center row in [1, 11] and same lane keeps the 3x3 patch in bounds
        const int row = 1 + rng.uniform_int(11);
        const double y = 500.0 + (6 - row) * 15.0 + rng.uniform(-7.4, 7.4);
        const int k = 1 + rng.uniform_int(30);
        nb.prediction = constant_prediction(30.0, 500.0);
        nb.prediction.positions[size_t(k - 1)] = {30.0 + rng.uniform(-5.9, 5.9), y};
        in.neighbors.push_back(nb);
        const ContextGrid g = build_grid(in);

        double mass = 0.0;
        for (int r = 0; r < GridSpec::kRows; ++r)
            for (int col = 0; col < GridSpec::kCols; ++col) mass += g.at(r, col, 30 + k - 1);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("build_grid: monotone decay of the center cell for a stationary prediction") {
    GridInputs in;
    in.ego_history = stationary_ego(30.0, 500.0, 3);
    NeighborInput nb = absent_neighbor(2);
    nb.prediction = constant_prediction(30.0, 545.0);  // row 3, col 1
    in.neighbors.push_back(nb);
    const ContextGrid g = build_grid(in);
    for (int k = 2; k <= GridSpec::kFuture; ++k)
        CHECK(g.at(3, 1, 30 + k - 1) <= g.at(3, 1, 30 + k - 2));
}

namespace {

GridInputs random_scene(Rng& rng) {
    GridInputs in;
    in.lane_width = 12.0;
    const int ego_lane = 1 + rng.uniform_int(5);
    double ego_y = rng.uniform(0.0, 1000.0);
    for (int c = 0; c < GridSpec::kPast; ++c) {
        in.ego_history.push_back(
            {(ego_lane - 0.5) * 12.0 + rng.uniform(-2, 2), ego_y, ego_lane});
        ego_y += rng.uniform(0.0, 2.0);
    }
    const int n = rng.uniform_int(9);
    for (int v = 0; v < n; ++v) {
        NeighborInput nb;
        nb.vehicle_id = v + 2;
        const int lane = 1 + rng.uniform_int(5);
        double y = in.ego_history.back().y + rng.uniform(-110.0, 110.0);
        for (int c = 0; c < GridSpec::kPast; ++c) {
            if (rng.uniform() < 0.15) {
                nb.past.push_back(std::nullopt);
            } else {
                nb.past.push_back(GridPose{(lane - 0.5) * 12.0 + rng.uniform(-2, 2), y, lane});
            }
            y += rng.uniform(0.0, 2.0);
        }
        for (int k = 0; k < GridSpec::kFuture; ++k) {
            nb.prediction.positions.push_back(
                {rng.uniform(0.0, 60.0), in.ego_history.back().y + rng.uniform(-110.0, 110.0)});
        }
        in.neighbors.push_back(std::move(nb));
    }
    return in;
}

}  // namespace

TEST_CASE("build_grid: exact match with the naive rasterizer on random scenes") {
    Rng rng(777);
    for (int it = 0; it < 1000; ++it) {
        const GridInputs in = random_scene(rng);
        const ContextGrid got = build_grid(in);
        const ContextGrid want = oracle::rasterize(in);
        REQUIRE(got.values.size() == want.values.size());
        for (size_t i = 0; i < got.values.size(); ++i) CHECK(got.values[i] == want.values[i]);
        // past channels are binary, future channels stay within [0, 1]
        for (int r = 0; r < GridSpec::kRows; ++r)
            for (int c = 0; c < GridSpec::kCols; ++c) {
                for (int ch = 0; ch < GridSpec::kPast; ++ch) {
                    const double v = got.at(r, c, ch);
                    CHECK((v == 0.0 || v == 1.0));
                }
                for (int ch = GridSpec::kPast; ch < GridSpec::kChannels; ++ch) {
                    CHECK(got.at(r, c, ch) >= 0.0);
                    CHECK(got.at(r, c, ch) <= 1.0);
                }
            }
    }
}

TEST_CASE("build_grid: invariant under whole-scene translation") {
    Rng rng(888);
    for (int it = 0; it < 25; ++it) {
        const GridInputs base = random_scene(rng);
        GridInputs moved = base;
        const int lane_shift = rng.uniform_int(3) - 1;
        const double dx = lane_shift * moved.lane_width;
        const double dy = rng.uniform(-400.0, 400.0);
        for (auto& pose : moved.ego_history) {
            pose.x += dx;
            pose.y += dy;
            pose.lane += lane_shift;
        }
        for (auto& nb : moved.neighbors) {
            for (auto& slot : nb.past)
                if (slot) {
                    slot->x += dx;
                    slot->y += dy;
                    slot->lane += lane_shift;
                }
            for (auto& pos : nb.prediction.positions) {
                pos[0] += dx;
                pos[1] += dy;
            }
        }
        const ContextGrid a = build_grid(base);
        const ContextGrid b = build_grid(moved);
        for (size_t i = 0; i < a.values.size(); ++i)
            CHECK(a.values[i] == doctest::Approx(b.values[i]).epsilon(1e-12));
    }
}

TEST_CASE("grid_to_text golden block") {
    GridInputs in;
    in.ego_history = stationary_ego(30.0, 500.0, 3);
    NeighborInput nb = absent_neighbor(2);
    for (auto& slot : nb.past) slot = GridPose{30.0, 530.0, 3};
    nb.prediction = constant_prediction(30.0, 530.0);
    in.neighbors.push_back(nb);
    const std::string text = grid_to_text(build_grid(in));
    CHECK(text.find("channel 0\n") != std::string::npos);
    // channel 0, row 4 holds the single past occupancy in the middle column
    const size_t ch0 = text.find("channel 0\n");
    std::string block = text.substr(ch0, text.find("channel 1\n") - ch0);
    CHECK(block.find("0.000000 1.000000 0.000000") != std::string::npos);
}
