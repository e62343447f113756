#include "pmp/grid.hpp"

#include <cmath>
#include <cstdio>

namespace pmp {

double occupancy_probability(int t) {
    if (t < 0 || t > 30)
        throw Error(ErrCode::Domain,
                    "occupancy probability time index " + std::to_string(t) + " outside [0, 30]");
    return 0.47 + std::sqrt(0.236 - 0.004 * double(t));
}

CellRef cell_index(double ego_y, int ego_lane, double other_y, int other_lane) {
    CellRef ref;
    ref.col = other_lane - ego_lane + 1;
    ref.row = GridSpec::kEgoRow - int(std::lround((other_y - ego_y) / GridSpec::kCellLength));
    ref.in_region = std::abs(other_lane - ego_lane) <= 1 && ref.row >= 0 &&
                    ref.row < GridSpec::kRows;
    return ref;
}

int lane_of_x(double x, double lane_width) {
    return int(std::floor(x / lane_width)) + 1;
}

namespace {

void deposit_max(ContextGrid& grid, int row, int col, int channel, double value) {
    if (row < 0 || row >= GridSpec::kRows || col < 0 || col >= GridSpec::kCols) return;
    double& cell = grid.at(row, col, channel);
    if (value > cell) cell = value;
}

}  // namespace

ContextGrid build_grid(const GridInputs& in) {
    if (int(in.ego_history.size()) != GridSpec::kPast)
        throw Error(ErrCode::Shape, "ego history must cover exactly " +
                                        std::to_string(GridSpec::kPast) + " frames");
    for (const NeighborInput& nb : in.neighbors) {
        if (int(nb.past.size()) != GridSpec::kPast)
            throw Error(ErrCode::Shape, "neighbor " + std::to_string(nb.vehicle_id) +
                                            " history not aligned with ego history");
        if (nb.prediction.horizon() != GridSpec::kFuture)
            throw Error(ErrCode::Data, "missing prediction for in-range neighbor " +
                                           std::to_string(nb.vehicle_id));
    }

    ContextGrid grid;
    const GridPose& ego_now = in.ego_history.back();
    const int ego_lane_now = ego_now.lane;

    for (const NeighborInput& nb : in.neighbors) {
        // past/present: binary occupancy relative to the ego pose of the same frame
        for (int c = 0; c < GridSpec::kPast; ++c) {
            if (!nb.past[size_t(c)]) continue;
            const GridPose& ego_then = in.ego_history[size_t(c)];
            const GridPose& other = *nb.past[size_t(c)];
            const CellRef ref = cell_index(ego_then.y, ego_then.lane, other.y, other.lane);
            if (ref.in_region) grid.at(ref.row, ref.col, c) = 1.0;
        }
        // future: probabilistic occupancy relative to the current ego pose
        for (int k = 1; k <= GridSpec::kFuture; ++k) {
            const auto& pos = nb.prediction.positions[size_t(k - 1)];
            const int pred_lane = lane_of_x(pos[0], in.lane_width);
            const int channel = GridSpec::kPast + k - 1;
            const double p = occupancy_probability(k);
            const double halo = (1.0 - p) / 8.0;
            const int row = GridSpec::kEgoRow -
                            int(std::lround((pos[1] - ego_now.y) / GridSpec::kCellLength));
            const int col = pred_lane - ego_lane_now + 1;
            for (int dr = -1; dr <= 1; ++dr)
                for (int dc = -1; dc <= 1; ++dc)
                    deposit_max(grid, row + dr, col + dc, channel,
                                (dr == 0 && dc == 0) ? p : halo);
        }
    }
    return grid;
}

std::string grid_to_text(const ContextGrid& grid) {
    std::string out;
    char buf[64];
    for (int c = 0; c < GridSpec::kChannels; ++c) {
        std::snprintf(buf, sizeof(buf), "channel %d\n", c);
        out += buf;
        for (int r = 0; r < GridSpec::kRows; ++r) {
            for (int col = 0; col < GridSpec::kCols; ++col) {
                std::snprintf(buf, sizeof(buf), col ? " %.6f" : "%.6f", grid.at(r, col, c));
                out += buf;
            }
            out += '\n';
        }
    }
    return out;
}

}  // namespace pmp
