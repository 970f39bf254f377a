#pragma once

#include "czirok/config.hpp"
#include "czirok/table.hpp"

namespace czirok {

// Dispatches a validated config to the model/stability/stats layers and
// assembles the result table. Deterministic for a fixed seed; sweep cells
// may run on config.threads threads without changing the output.
ResultTable run_config(const ExperimentConfig& config);

// Pinned parameter sets reproducing the reference experiments fig1..fig9.
ExperimentConfig figure_preset(const std::string& id);

}
