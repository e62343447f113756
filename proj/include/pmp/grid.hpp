#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pmp/error.hpp"
#include "pmp/mnn.hpp"

namespace pmp {

struct GridSpec {
    static constexpr int kRows = 13;      // longitudinal cells, ego at row 6
    static constexpr int kCols = 3;       // ego lane +- 1
    static constexpr int kPast = 30;      // past/present binary channels
    static constexpr int kFuture = 30;    // probabilistic occupancy channels
    static constexpr int kChannels = kPast + kFuture;
    static constexpr int kEgoRow = 6;
    static constexpr double kCellLength = 15.0;  // ft, one average vehicle length
};

// Row x col x channel occupancy values in [0, 1]. Channel c < 30 is binary
// occupancy at frame t-29+c; channel 30+k-1 is the probabilistic map for
// horizon k. Smaller row index = further ahead of the ego.
struct ContextGrid {
    std::vector<double> values;

    ContextGrid() : values(size_t(GridSpec::kRows * GridSpec::kCols * GridSpec::kChannels), 0.0) {}

    static int offset(int row, int col, int channel) {
        return (row * GridSpec::kCols + col) * GridSpec::kChannels + channel;
    }
    double at(int row, int col, int channel) const {
        return values[size_t(offset(row, col, channel))];
    }
    double& at(int row, int col, int channel) {
        return values[size_t(offset(row, col, channel))];
    }

    bool operator==(const ContextGrid&) const = default;
};

// P(t) = 0.47 + sqrt(0.236 - 0.004 t) for time index t in [0, 30].
double occupancy_probability(int t);

struct CellRef {
    int row = 0;
    int col = 0;
    bool in_region = false;
};

// Relative cell of a (y, lane) pose w.r.t. the ego pose. Ahead of the ego
// means a smaller row index; col 1 is the ego lane.
CellRef cell_index(double ego_y, int ego_lane, double other_y, int other_lane);

// Minimal pose carried per grid frame; lane is the road lane index.
struct GridPose {
    double x = 0.0;
    double y = 0.0;
    int lane = 1;
};

struct NeighborInput {
    int vehicle_id = 0;
    // aligned with the ego history frames (t-29 .. t); empty where absent
    std::vector<std::optional<GridPose>> past;
    PredictionResult prediction;  // horizons 1..30
};

struct GridInputs {
    std::vector<GridPose> ego_history;  // exactly 30 poses, oldest first
    std::vector<NeighborInput> neighbors;
    double lane_width = 12.0;  // converts predicted x to a lane index
};

// Past channels mark each neighbor cell relative to the ego pose of the same
// frame; future channels deposit P(k) on the predicted cell and (1-P(k))/8 on
// its 8-neighborhood, clipped at the grid border. Overlaps keep the per-cell
// maximum.
ContextGrid build_grid(const GridInputs& in);

int lane_of_x(double x, double lane_width);

// one text block per channel, row-major (golden-file format)
std::string grid_to_text(const ContextGrid& grid);

}  // namespace pmp
