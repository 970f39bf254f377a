#pragma once

#include "czirok/neighbor.hpp"
#include "czirok/rng.hpp"
#include "czirok/series.hpp"

namespace czirok {

// One explicit Euler update: x' = wrap(x + u dt), u' = u + (G(<u>) - u) dt
// + sigma dW with dW ~ N(0, dt), drawn in agent index order.
void euler_step(SwarmState& state, const ModelParams& params, Rng& rng,
                NeighborWorkspace& ws, std::vector<double>& avg);

SwarmState euler_step(const SwarmState& state, const ModelParams& params,
                      Rng& rng);

// Positions i.i.d. uniform on [0, L); velocities i.i.d. Gaussian with mean
// xi and variance sigma^2/2. All positions first, then all velocities.
SwarmState sample_initial(double xi, const ModelParams& params, Rng& rng);

// Runs params.steps Euler steps from init, recording the requested
// observables at every step including step 0 (steps+1 entries).
RunSeries simulate(const ModelParams& params, const SwarmState& init,
                   const Observers& observers);

}
