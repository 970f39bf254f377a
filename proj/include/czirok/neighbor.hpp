#pragma once

#include <vector>

#include "czirok/model.hpp"

namespace czirok {

// Scratch buffers for the cell-list path, reusable across steps.
struct NeighborWorkspace {
    std::vector<int> count;
    std::vector<int> offset;
    std::vector<double> bx;  // positions grouped by bucket, stable order
    std::vector<double> bu;  // matching velocities
};

// Weighted local velocity average for every agent. symmetric mode:
// <u>_i = (1/N) sum_j u_j phi(||x_j - x_i||), self included; normalized
// mode divides by sum_j phi instead of N (0 if the weight sum is 0, which
// is unreachable with self-inclusion and phi(0) > 0). Uses a periodic cell
// list when N >= 64 and r <= L/4, direct summation otherwise.
void neighbor_average_into(const SwarmState& state, const ModelParams& params,
                           NeighborWorkspace& ws, std::vector<double>& out);

std::vector<double> neighbor_average(const SwarmState& state,
                                     const ModelParams& params);

// O(N^2) reference summation, kept as the oracle for the fast path.
std::vector<double> neighbor_average_direct(const SwarmState& state,
                                            const ModelParams& params);

}
