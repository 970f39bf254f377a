#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "czirok/experiments.hpp"
#include "czirok/version.hpp"

namespace {

// Exit codes: 0 success, 1 I/O or internal error, 2 config error,
// 3 table emitted but contains failed rows.
constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitConfig = 2;
constexpr int kExitFailedRows = 3;

std::string kind_name(czirok::ExperimentKind kind) {
    using czirok::ExperimentKind;
    switch (kind) {
        case ExperimentKind::simulate: return "simulate";
        case ExperimentKind::stability: return "stability";
        case ExperimentKind::critical_sigma: return "critical-sigma";
        case ExperimentKind::sweep: return "sweep";
        case ExperimentKind::transitions: return "transitions";
        case ExperimentKind::fluctuation: return "fluctuation";
        case ExperimentKind::figure_preset: return "figure";
    }
    return "?";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Collective-motion simulator and stability toolkit"};
    app.set_version_flag("--version", std::string(czirok::kVersion));

    std::string experiment;
    std::string figure_id;
    std::string config_path;
    std::string out_path;
    std::string format = "csv";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 1;

    app.add_option("experiment", experiment,
                   "simulate | stability | critical-sigma | sweep | "
                   "transitions | fluctuation | figure")
        ->required();
    app.add_option("id", figure_id, "preset id fig1..fig9 (with 'figure')");
    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--seed", seed, "override the model seed")
        ->each([&](const std::string&) { seed_set = true; });
    app.add_option("--out", out_path, "output path (default stdout)");
    app.add_option("--threads", threads, "worker threads for sweep cells")
        ->check(CLI::PositiveNumber);
    app.add_option("--format", format, "csv | json")
        ->check(CLI::IsMember({"csv", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        czirok::ExperimentConfig config;
        if (experiment == "figure") {
            if (figure_id.empty()) {
                std::cerr << "error: 'figure' needs a preset id fig1..fig9\n";
                return kExitConfig;
            }
            if (!config_path.empty()) {
                std::cerr << "error: presets take no --config; use "
                             "kind \"figure-preset:" << figure_id
                          << "\" in a config file instead\n";
                return kExitConfig;
            }
            config = czirok::figure_preset(figure_id);
        } else {
            if (config_path.empty()) {
                std::cerr << "error: --config is required for '" << experiment
                          << "'\n";
                return kExitConfig;
            }
            config = czirok::load_config(config_path);
            if (kind_name(config.kind) != experiment) {
                std::cerr << "error: config kind '" << kind_name(config.kind)
                          << "' does not match requested experiment '"
                          << experiment << "'\n";
                return kExitConfig;
            }
        }
        if (seed_set) config.model.seed = seed;
        config.out_path = out_path;
        config.threads = threads;

        const czirok::ResultTable table = czirok::run_config(config);
        const czirok::TableFormat fmt = format == "json"
                                            ? czirok::TableFormat::json
                                            : czirok::TableFormat::csv;
        if (out_path.empty())
            czirok::emit(table, fmt, std::cout);
        else
            czirok::emit(table, fmt, out_path);

        if (table.num_failed > 0) {
            std::cerr << "warning: " << table.num_failed
                      << " row(s) failed; see the 'failed' column\n";
            return kExitFailedRows;
        }
        return kExitOk;
    } catch (const czirok::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInternal;
    }
}
