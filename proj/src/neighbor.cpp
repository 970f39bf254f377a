#include "czirok/neighbor.hpp"

#include <cmath>

#include "czirok/torus.hpp"

namespace czirok {

namespace {

void direct_into(const SwarmState& state, const ModelParams& params,
                 std::vector<double>& out) {
    const auto& kernel = params.kernel;
    const std::size_t n = state.size();
    const double L = params.l;
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double acc_u = 0.0;
        double acc_w = 0.0;
        const double xi = state.x[i];
        for (std::size_t j = 0; j < n; ++j) {
            double w = kernel.phi(torus_distance(xi, state.x[j], L));
            acc_u += state.u[j] * w;
            acc_w += w;
        }
        if (params.averaging == Averaging::symmetric)
            out[i] = acc_u / static_cast<double>(params.n);
        else
            out[i] = acc_w > 0.0 ? acc_u / acc_w : 0.0;
    }
}

void cells_into(const SwarmState& state, const ModelParams& params,
                NeighborWorkspace& ws, std::vector<double>& out) {
    const std::size_t n = state.size();
    const double L = params.l;
    const double r = params.kernel.r;
    const double amp = params.kernel.amplitude();

    int nb = static_cast<int>(std::floor(L / r));
    if (L / nb < r) --nb;  // keep bucket width >= r despite rounding
    const double inv_width = nb / L;

    ws.count.assign(nb, 0);
    ws.offset.assign(nb + 1, 0);
    ws.bx.resize(n);
    ws.bu.resize(n);
    out.resize(n);

    auto bucket_of = [&](double x) {
        int b = static_cast<int>(x * inv_width);
        return b >= nb ? nb - 1 : b;
    };

    // Counting sort, stable in agent index, so within a bucket the
    // accumulation order matches the direct sum.
    for (std::size_t i = 0; i < n; ++i) ++ws.count[bucket_of(state.x[i])];
    for (int b = 0; b < nb; ++b) ws.offset[b + 1] = ws.offset[b] + ws.count[b];
    {
        std::vector<int>& cursor = ws.count;  // reuse as scatter cursor
        for (int b = 0; b < nb; ++b) cursor[b] = ws.offset[b];
        for (std::size_t i = 0; i < n; ++i) {
            int p = cursor[bucket_of(state.x[i])]++;
            ws.bx[p] = state.x[i];
            ws.bu[p] = state.u[i];
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        const double xi = state.x[i];
        const int b = bucket_of(xi);
        double acc_u = 0.0;
        double acc_w = 0.0;
        for (int db = -1; db <= 1; ++db) {
            int bb = b + db;
            if (bb < 0) bb += nb;
            if (bb >= nb) bb -= nb;
            const int lo = ws.offset[bb];
            const int hi = ws.offset[bb + 1];
            for (int p = lo; p < hi; ++p) {
                if (torus_distance(xi, ws.bx[p], L) <= r) {
                    acc_u += ws.bu[p] * amp;
                    acc_w += amp;
                }
            }
        }
        if (params.averaging == Averaging::symmetric)
            out[i] = acc_u / static_cast<double>(params.n);
        else
            out[i] = acc_w > 0.0 ? acc_u / acc_w : 0.0;
    }
}

}  // namespace

void neighbor_average_into(const SwarmState& state, const ModelParams& params,
                           NeighborWorkspace& ws, std::vector<double>& out) {
    const bool use_cells = params.kernel.variant == KernelVariant::top_hat &&
                           params.n >= 64 && params.kernel.r <= params.l / 4.0;
    if (use_cells)
        cells_into(state, params, ws, out);
    else
        direct_into(state, params, out);
}

std::vector<double> neighbor_average(const SwarmState& state,
                                     const ModelParams& params) {
    NeighborWorkspace ws;
    std::vector<double> out;
    neighbor_average_into(state, params, ws, out);
    return out;
}

std::vector<double> neighbor_average_direct(const SwarmState& state,
                                            const ModelParams& params) {
    std::vector<double> out;
    direct_into(state, params, out);
    return out;
}

}  // namespace czirok
