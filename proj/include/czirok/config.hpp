#pragma once

#include <optional>
#include <string>
#include <vector>

#include "czirok/model.hpp"

namespace czirok {

enum class ExperimentKind {
    simulate,
    stability,
    critical_sigma,
    sweep,
    transitions,
    fluctuation,
    figure_preset,
};

struct SweepAxes {
    std::vector<long> n;
    std::vector<double> sigma;
    std::vector<double> h;

    bool empty() const { return n.empty() && sigma.empty() && h.empty(); }
};

struct DetectorSpec {
    double enter_frac = 0.8;
    double exit_frac = 0.2;
};

struct KdeSpec {
    double bandwidth = 0.0;  // 0 means L/20
    int grid = 256;
};

struct ExperimentConfig {
    ModelParams model;
    ExperimentKind kind = ExperimentKind::simulate;
    std::string preset_id;  // fig1..fig9 when kind == figure_preset
    SweepAxes axes;
    long replicates = 1;
    DetectorSpec detector;
    KdeSpec kde;
    // Initial mean velocity for simulation-style runs; unset means the
    // largest compatibility root. Set by presets, not by the file schema.
    std::optional<double> init_xi;
    // CLI-only knobs; not part of the config file schema.
    std::string out_path;
    int threads = 1;
};

// Validation failure carrying one message per offending field.
struct ConfigError : std::runtime_error {
    explicit ConfigError(std::vector<std::string> issues_);
    std::vector<std::string> issues;
};

// Parses and validates the JSON config text. The key schema is exactly
// {model:{n,l,sigma,dt,steps,seed,g:{variant,h|a|coeffs},kernel:{variant,r},
// averaging}, experiment:{kind,axes,replicates,detector:{enter_frac,
// exit_frac},kde:{bandwidth,grid}}}; unknown keys are errors. kind
// "figure-preset:figN" selects a preset.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

// FNV-1a over the canonical (sorted-key) form of the parsed config.
std::string config_hash(const ExperimentConfig& config);

}
