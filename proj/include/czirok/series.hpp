#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "czirok/model.hpp"

namespace czirok {

// Which per-step observables simulate() records. A snapshot_stride of 0
// disables position snapshots; stride s keeps every s-th step (and step 0).
struct Observers {
    bool mean_velocity = true;
    bool discrepancy = true;
    int discrepancy_stride = 1;
    int snapshot_stride = 0;
};

struct RunSeries {
    std::vector<double> times;
    std::vector<double> mean_velocity;
    std::vector<double> discrepancy;        // sampled at discrepancy_stride
    std::vector<double> discrepancy_times;
    std::vector<std::pair<double, std::vector<double>>> position_snapshots;
    ModelParams meta;
    std::uint64_t seed = 0;
};

}
