#include "czirok/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "czirok/rng.hpp"
#include "czirok/sim.hpp"
#include "czirok/stability.hpp"
#include "czirok/stats.hpp"
#include "czirok/version.hpp"

namespace czirok {

namespace {

constexpr int kMaxMode = 8;          // modes examined by analyzer kinds
constexpr double kSigmaTol = 0.02;   // critical-noise bisection tolerance
constexpr std::uint64_t kInitStream = 0x696e6974;  // initial-draw substream
constexpr std::uint64_t kCellMask = 0xffffffffffff;  // 48-bit sweep seeds

const double kNan = std::numeric_limits<double>::quiet_NaN();

double resolve_init_xi(const ExperimentConfig& c) {
    return c.init_xi ? *c.init_xi : ordered_state_root(c.model.g);
}

RunSeries run_sim(const ModelParams& params, double xi0,
                  const Observers& obs) {
    Rng init_rng(derive_seed(params.seed, kInitStream));
    const SwarmState init = sample_initial(xi0, params, init_rng);
    return simulate(params, init, obs);
}

Provenance make_provenance(const ExperimentConfig& c) {
    Provenance p;
    p.version = kVersion;
    p.config_hash = config_hash(c);
    p.seed = c.model.seed;
    return p;
}

double series_mean(const std::vector<double>& v) {
    if (v.empty()) return kNan;
    double s = 0.0;
    for (double x : v) s += x;
    return s / v.size();
}

double tail_mean(const std::vector<double>& v, std::size_t count) {
    if (v.empty()) return kNan;
    const std::size_t take = std::min(count, v.size());
    double s = 0.0;
    for (std::size_t i = v.size() - take; i < v.size(); ++i) s += v[i];
    return s / take;
}

ResultTable run_simulate(const ExperimentConfig& c) {
    const double xi0 = resolve_init_xi(c);
    Observers obs;
    RunSeries s = run_sim(c.model, xi0, obs);

    ResultTable t;
    t.columns = {"time", "mean_velocity", "discrepancy"};
    t.provenance = make_provenance(c);
    t.provenance.annotations.emplace_back("init_xi", format_cell(xi0));
    for (std::size_t i = 0; i < s.times.size(); ++i)
        t.add_row({s.times[i], s.mean_velocity[i], s.discrepancy[i]});
    return t;
}

ResultTable run_stability(const ExperimentConfig& c) {
    const double xi = resolve_init_xi(c);

    ResultTable t;
    t.columns = {"k",      "gamma_r", "gamma_i", "n_roots",
                 "status", "bound_ok", "velocity"};
    t.provenance = make_provenance(c);
    t.provenance.annotations.emplace_back("xi", format_cell(xi));
    t.provenance.annotations.emplace_back(
        "zeroth_mode_stable",
        zeroth_mode_stable(c.model.g, xi) ? "1" : "0");

    for (int k = 1; k <= kMaxMode; ++k) {
        const ModeContext ctx =
            make_mode_context(c.model.g, xi, c.model.kernel, c.model.sigma, k);
        const GrowthResult res = find_growth_roots(ctx, default_search_rect(ctx));
        const double vel = res.roots.empty()
                               ? kNan
                               : res.gamma_i * c.model.l / (2.0 * M_PI * k);
        t.add_row({static_cast<double>(k), res.gamma_r, res.gamma_i,
                   static_cast<double>(res.roots.size()),
                   static_cast<double>(static_cast<int>(res.status)),
                   res.sufficient_bound_ok ? 1.0 : 0.0, vel});
    }
    if (auto pred = most_unstable_mode(c.model.g, xi, c.model.kernel,
                                       c.model.sigma, kMaxMode)) {
        t.provenance.annotations.emplace_back("k_max",
                                              std::to_string(pred->k_max));
        t.provenance.annotations.emplace_back("predicted_velocity",
                                              format_cell(pred->velocity));
    }
    return t;
}

ResultTable run_critical_sigma(const ExperimentConfig& c) {
    const double xi = resolve_init_xi(c);
    const double sc =
        critical_sigma(c.model.g, xi, c.model.kernel, kMaxMode, kSigmaTol);

    ResultTable t;
    t.columns = {"sigma_c", "tol", "k_range"};
    t.provenance = make_provenance(c);
    t.provenance.annotations.emplace_back("xi", format_cell(xi));
    t.add_row({sc, kSigmaTol, static_cast<double>(kMaxMode)});
    return t;
}

ResultTable run_transitions(const ExperimentConfig& c) {
    const double xe = ordered_state_root(c.model.g);
    const double xi0 = resolve_init_xi(c);
    Observers obs;
    obs.discrepancy = false;
    RunSeries s = run_sim(c.model, xi0, obs);
    const TransitionReport rep =
        count_transitions(s, xe, c.detector.enter_frac, c.detector.exit_frac);

    ResultTable t;
    t.columns = {"event_time", "from", "to"};
    t.provenance = make_provenance(c);
    t.provenance.annotations.emplace_back("transition_count",
                                          std::to_string(rep.count));
    t.provenance.annotations.emplace_back("xi_e", format_cell(xe));
    t.provenance.annotations.emplace_back("enter_frac",
                                          format_cell(c.detector.enter_frac));
    t.provenance.annotations.emplace_back("exit_frac",
                                          format_cell(c.detector.exit_frac));
    for (const TransitionEvent& e : rep.events)
        t.add_row({e.time, static_cast<double>(e.from),
                   static_cast<double>(e.to)});
    return t;
}

ResultTable run_fluctuation(const ExperimentConfig& c) {
    const double xi = ordered_state_root(c.model.g);
    const double L = c.model.l;
    const TestFunction cases[3] = {
        [](double, double) { return 1.0; },
        [](double, double u) { return u; },
        [L](double x, double) { return std::cos(2.0 * M_PI * x / L); },
    };

    ResultTable t;
    t.columns = {"case", "empirical", "predicted", "z"};
    t.provenance = make_provenance(c);
    t.provenance.annotations.emplace_back("xi", format_cell(xi));
    t.provenance.annotations.emplace_back(
        "cases", "0:constant 1:velocity 2:cos(2 pi x / L)");
    for (int i = 0; i < 3; ++i) {
        const FluctuationResult r = fluctuation_covariance_test(
            xi, c.model.sigma, L, cases[i], cases[i], c.model.n, c.replicates,
            derive_seed(c.model.seed, static_cast<std::uint64_t>(i)));
        t.add_row({static_cast<double>(i), r.empirical, r.predicted, r.z});
    }
    return t;
}

struct SweepCell {
    long n;
    double sigma;
    double h;
    long replicate;
    std::uint64_t seed;
};

ResultTable run_sweep(const ExperimentConfig& c) {
    const bool sweep_h = !c.axes.h.empty();
    if (sweep_h && c.model.g.variant != GVariant::cubic)
        throw std::invalid_argument(
            "sweep axis h requires the cubic G variant");

    std::vector<long> ns =
        c.axes.n.empty() ? std::vector<long>{c.model.n} : c.axes.n;
    std::vector<double> sigmas = c.axes.sigma.empty()
                                     ? std::vector<double>{c.model.sigma}
                                     : c.axes.sigma;
    std::vector<double> hs =
        sweep_h ? c.axes.h : std::vector<double>{c.model.g.h};

    std::vector<SweepCell> cells;
    for (std::size_t in = 0; in < ns.size(); ++in)
        for (std::size_t is = 0; is < sigmas.size(); ++is)
            for (std::size_t ih = 0; ih < hs.size(); ++ih)
                for (long rep = 0; rep < c.replicates; ++rep) {
                    SweepCell cell;
                    cell.n = ns[in];
                    cell.sigma = sigmas[is];
                    cell.h = hs[ih];
                    cell.replicate = rep;
                    cell.seed =
                        derive_seed(c.model.seed, in, is, ih,
                                    static_cast<std::uint64_t>(rep)) &
                        kCellMask;
                    cells.push_back(cell);
                }

    std::vector<std::vector<double>> rows(cells.size());
    std::vector<char> failed(cells.size(), 0);

    auto work = [&](std::size_t idx) {
        const SweepCell& cell = cells[idx];
        ModelParams params = c.model;
        params.n = cell.n;
        params.sigma = cell.sigma;
        params.g.h = cell.h;
        params.kernel.L = params.l;
        params.seed = cell.seed;
        try {
            const double xe = ordered_state_root(params.g);
            const double xi0 = c.init_xi ? *c.init_xi : xe;
            Observers obs;
            obs.discrepancy_stride = 100;
            RunSeries s = run_sim(params, xi0, obs);
            const double transitions =
                xe > 0.0 ? static_cast<double>(
                               count_transitions(s, xe, c.detector.enter_frac,
                                                 c.detector.exit_frac)
                                   .count)
                         : kNan;
            rows[idx] = {static_cast<double>(cell.n),
                         cell.sigma,
                         cell.h,
                         static_cast<double>(cell.replicate),
                         static_cast<double>(cell.seed),
                         transitions,
                         series_mean(s.mean_velocity),
                         tail_mean(s.mean_velocity, 500),
                         series_mean(s.discrepancy),
                         0.0};
        } catch (const std::exception&) {
            rows[idx] = {static_cast<double>(cell.n), cell.sigma, cell.h,
                         static_cast<double>(cell.replicate),
                         static_cast<double>(cell.seed), kNan, kNan, kNan,
                         kNan, 1.0};
            failed[idx] = 1;
        }
    };

    const int nthreads =
        std::max(1, std::min<int>(c.threads, static_cast<int>(cells.size())));
    if (nthreads <= 1) {
        for (std::size_t i = 0; i < cells.size(); ++i) work(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        for (int t = 0; t < nthreads; ++t)
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= cells.size()) break;
                    work(i);
                }
            });
        for (auto& th : pool) th.join();
    }

    ResultTable t;
    t.columns = {"n",    "sigma",      "h",       "replicate", "seed",
                 "transitions", "mean_u_avg", "final_u", "cl2_avg",   "failed"};
    t.provenance = make_provenance(c);
    t.provenance.annotations.emplace_back("replicates",
                                          std::to_string(c.replicates));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        t.add_row(rows[i]);
        if (failed[i]) ++t.num_failed;
    }
    return t;
}

// Continues the dominant admissible root of one mode across a parameter
// scan: warm Newton from the previous value, full search on a miss.
std::optional<Complex> continue_dominant(const ModeContext& ctx,
                                         std::optional<Complex> warm) {
    const double c = 0.5 * ctx.sigma * ctx.sigma * ctx.Dk * ctx.Dk;
    if (warm) {
        Complex start = *warm;
        if (start.real() <= -c + 1e-4)
            start = Complex(-c + 1e-3, start.imag());
        if (auto r = refine_root(ctx, start)) return r;
    }
    SearchRect pos = default_search_rect(ctx);
    pos.n_re = 10;
    pos.n_im = 20;
    std::vector<Complex> roots = resolvent_roots(ctx, pos);
    SearchRect neg = pos;
    neg.re_lo = -0.95 * c;
    neg.re_hi = -1e-3 * c;
    neg.n_re = 6;
    neg.n_im = 16;
    for (Complex r : resolvent_roots(ctx, neg)) roots.push_back(r);
    if (roots.empty()) return std::nullopt;
    return *std::max_element(roots.begin(), roots.end(),
                             [](Complex a, Complex b) {
                                 if (a.real() != b.real())
                                     return a.real() < b.real();
                                 return std::fabs(a.imag()) <
                                        std::fabs(b.imag());
                             });
}

// Dispersion scan of the k = 1 mode: dominant root against sigma for
// several well depths.
ResultTable preset_mode_scan(const ExperimentConfig& c) {
    ResultTable t;
    t.columns = {"h", "sigma", "gamma_r", "gamma_i"};
    t.provenance = make_provenance(c);
    t.provenance.annotations.emplace_back("k", "1");
    t.provenance.annotations.emplace_back(
        "reference_sigma_c", "h5:1.8 h6:0.85 h8:1.4 h10:2.2");

    const double hs[4] = {5.0, 6.0, 8.0, 10.0};
    for (double h : hs) {
        GSpec g;
        g.variant = GVariant::cubic;
        g.h = h;
        const double xi = ordered_state_root(g);
        std::optional<Complex> warm;
        for (int i = 0; i <= 28; ++i) {
            const double sigma = 0.2 + 0.1 * i;
            const ModeContext ctx =
                make_mode_context(g, xi, c.model.kernel, sigma, 1);
            warm = continue_dominant(ctx, warm);
            if (warm)
                t.add_row({h, sigma, warm->real(), warm->imag()});
            else
                t.add_row({h, sigma, kNan, kNan});
        }
    }
    return t;
}

// One simulation per parameter value, series rows labelled by the value.
ResultTable preset_series(const ExperimentConfig& c,
                          const std::string& label,
                          const std::vector<double>& values,
                          const std::function<ModelParams(double)>& build,
                          const std::function<double(const ModelParams&)>&
                              init_of) {
    ResultTable t;
    t.columns = {label, "time", "mean_velocity", "discrepancy"};
    t.provenance = make_provenance(c);
    for (std::size_t i = 0; i < values.size(); ++i) {
        ModelParams params = build(values[i]);
        params.seed = derive_seed(c.model.seed, i);
        Observers obs;
        RunSeries s = run_sim(params, init_of(params), obs);
        for (std::size_t j = 0; j < s.times.size(); ++j)
            t.add_row({values[i], s.times[j], s.mean_velocity[j],
                       s.discrepancy[j]});
    }
    return t;
}

// Density evolution of one ordered run plus the fitted cluster speed.
ResultTable preset_density(const ExperimentConfig& c) {
    const double bw =
        c.kde.bandwidth > 0.0 ? c.kde.bandwidth : c.model.l / 20.0;
    Observers obs;
    // Peak unwrapping needs drift plus argmax jitter to stay well inside
    // L/2 between snapshots; at speeds of a few length units per time unit
    // that means sampling a few times per time unit.
    obs.snapshot_stride = 5;
    obs.discrepancy = false;
    RunSeries s = run_sim(c.model, resolve_init_xi(c), obs);

    ResultTable t;
    t.columns = {"time", "x", "density"};
    t.provenance = make_provenance(c);
    t.provenance.annotations.emplace_back("kde_bandwidth", format_cell(bw));
    t.provenance.annotations.emplace_back("kde_grid",
                                          std::to_string(c.kde.grid));
    const auto speed = cluster_velocity(s.position_snapshots, c.model.l, bw);
    t.provenance.annotations.emplace_back(
        "cluster_velocity", speed ? format_cell(*speed) : "none");
    for (std::size_t i = 0; i < s.position_snapshots.size(); i += 20) {
        const auto& [time, xs] = s.position_snapshots[i];
        const std::vector<double> dens =
            periodic_kde(xs, c.model.l, bw, c.kde.grid);
        for (int j = 0; j < c.kde.grid; ++j)
            t.add_row({time, c.model.l * j / c.kde.grid, dens[j]});
    }
    return t;
}

ResultTable run_preset(const ExperimentConfig& c) {
    const std::string& id = c.preset_id;
    auto cubic_params = [&](double h) {
        ModelParams p = c.model;
        p.g.variant = GVariant::cubic;
        p.g.h = h;
        return p;
    };
    auto sigma_params = [&](double sigma) {
        ModelParams p = c.model;
        p.sigma = sigma;
        return p;
    };
    auto root_init = [](const ModelParams& p) {
        return ordered_state_root(p.g);
    };
    auto zero_init = [](const ModelParams&) { return 0.0; };

    if (id == "fig1") return preset_mode_scan(c);
    if (id == "fig2")
        return preset_series(c, "h", {2.0, 6.0}, cubic_params, zero_init);
    if (id == "fig3")
        return preset_series(c, "sigma", {0.5, 1.0, 1.5}, sigma_params,
                             root_init);
    if (id == "fig4") return preset_density(c);
    if (id == "fig5")
        return preset_series(c, "sigma", {0.5, 1.0, 1.5}, sigma_params,
                             zero_init);
    if (id == "fig6")
        return preset_series(c, "h", {5.0, 10.0}, cubic_params, root_init);
    if (id == "fig7" || id == "fig8" || id == "fig9") return run_sweep(c);
    throw std::invalid_argument("unknown figure preset '" + id + "'");
}

}  // namespace

ResultTable run_config(const ExperimentConfig& config) {
    config.model.validate();
    switch (config.kind) {
        case ExperimentKind::simulate: return run_simulate(config);
        case ExperimentKind::stability: return run_stability(config);
        case ExperimentKind::critical_sigma:
            return run_critical_sigma(config);
        case ExperimentKind::sweep: return run_sweep(config);
        case ExperimentKind::transitions: return run_transitions(config);
        case ExperimentKind::fluctuation: return run_fluctuation(config);
        case ExperimentKind::figure_preset: return run_preset(config);
    }
    throw std::logic_error("run_config: unhandled kind");
}

ExperimentConfig figure_preset(const std::string& id) {
    ExperimentConfig c;
    c.kind = ExperimentKind::figure_preset;
    c.preset_id = id;
    c.model.l = 10.0;
    c.model.dt = 0.1;
    c.model.kernel.L = 10.0;

    if (id == "fig1") {
        c.model.steps = 0;
    } else if (id == "fig2") {
        c.model.n = 500;
        c.model.sigma = 2.0;
        c.model.steps = 2000;
        c.init_xi = 0.0;
    } else if (id == "fig3" || id == "fig5") {
        c.model.n = 2000;
        c.model.sigma = 0.5;
        c.model.steps = 2000;
        if (id == "fig5") c.init_xi = 0.0;
    } else if (id == "fig4") {
        c.model.n = 2000;
        c.model.sigma = 0.5;
        c.model.steps = 2000;
    } else if (id == "fig6") {
        c.model.n = 2000;
        c.model.sigma = 1.0;
        c.model.steps = 2000;
    } else if (id == "fig7") {
        c.axes.n = {80, 100, 120, 140};
        c.model.n = 100;
        c.model.sigma = 5.0;
        c.model.steps = 100000;
        c.replicates = 20;
    } else if (id == "fig8") {
        c.axes.sigma = {4.0, 4.5, 5.0, 5.5};
        c.model.n = 100;
        c.model.sigma = 5.0;
        c.model.steps = 100000;
        c.replicates = 20;
    } else if (id == "fig9") {
        c.axes.h = {5.0, 5.5, 6.0, 6.5};
        c.model.n = 100;
        c.model.sigma = 5.0;
        c.model.steps = 100000;
        c.replicates = 20;
    } else {
        throw ConfigError({"unknown figure preset '" + id + "'"});
    }
    return c;
}

}  // namespace czirok
