#include "czirok/sim.hpp"

#include <cmath>

#include "czirok/stats.hpp"
#include "czirok/torus.hpp"

namespace czirok {

void euler_step(SwarmState& state, const ModelParams& params, Rng& rng,
                NeighborWorkspace& ws, std::vector<double>& avg) {
    neighbor_average_into(state, params, ws, avg);
    const std::size_t n = state.size();
    const double dt = params.dt;
    const double noise = params.sigma * std::sqrt(dt);
    for (std::size_t i = 0; i < n; ++i) {
        double xi = state.x[i] + state.u[i] * dt;
        state.x[i] = wrap_position(xi, params.l);
        double drift = params.g(avg[i]) - state.u[i];
        state.u[i] += drift * dt + noise * rng.normal();
    }
    state.t += dt;
}

SwarmState euler_step(const SwarmState& state, const ModelParams& params,
                      Rng& rng) {
    SwarmState next = state;
    NeighborWorkspace ws;
    std::vector<double> avg;
    euler_step(next, params, rng, ws, avg);
    return next;
}

SwarmState sample_initial(double xi, const ModelParams& params, Rng& rng) {
    SwarmState state;
    state.x.resize(params.n);
    state.u.resize(params.n);
    state.t = 0.0;
    for (long i = 0; i < params.n; ++i)
        state.x[i] = wrap_position(params.l * rng.uniform(), params.l);
    const double sd = params.sigma / std::sqrt(2.0);
    for (long i = 0; i < params.n; ++i) state.u[i] = xi + sd * rng.normal();
    return state;
}

namespace {

void record(const SwarmState& state, const ModelParams& params,
            const Observers& obs, long step, RunSeries& out) {
    out.times.push_back(state.t);
    if (obs.mean_velocity) out.mean_velocity.push_back(mean_velocity(state));
    if (obs.discrepancy && step % std::max(1, obs.discrepancy_stride) == 0) {
        out.discrepancy.push_back(centered_l2_discrepancy(state.x, params.l));
        out.discrepancy_times.push_back(state.t);
    }
    if (obs.snapshot_stride > 0 && step % obs.snapshot_stride == 0)
        out.position_snapshots.emplace_back(state.t, state.x);
}

}  // namespace

RunSeries simulate(const ModelParams& params, const SwarmState& init,
                   const Observers& observers) {
    params.validate();
    if (static_cast<long>(init.size()) != params.n ||
        init.u.size() != init.x.size())
        throw std::invalid_argument("simulate: init does not match params.n");

    RunSeries out;
    out.meta = params;
    out.seed = params.seed;

    Rng rng(params.seed);
    SwarmState state = init;
    NeighborWorkspace ws;
    std::vector<double> avg;

    record(state, params, observers, 0, out);
    for (long s = 1; s <= params.steps; ++s) {
        euler_step(state, params, rng, ws, avg);
        record(state, params, observers, s, out);
    }
    return out;
}

}  // namespace czirok
