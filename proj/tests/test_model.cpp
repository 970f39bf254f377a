#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numeric>
#include <vector>

#include "czirok/model.hpp"
#include "czirok/neighbor.hpp"
#include "czirok/rng.hpp"
#include "czirok/sim.hpp"
#include "czirok/torus.hpp"

using namespace czirok;

namespace {

ModelParams base_params() {
    ModelParams p;
    p.l = 10.0;
    p.kernel.L = 10.0;
    p.kernel.r = 1.0;
    return p;
}

double simpson_fourier(const KernelSpec& kernel, int k) {
    // (2/L) integral_0^r phi(x) cos(2 pi k x / L) dx by composite Simpson,
    // split at the support edge so the integrand stays smooth; independent
    // of the closed form.
    const int panels = 4096;
    const double L = kernel.L;
    const double w = 2.0 * M_PI * k / L;
    const double r = kernel.r;
    auto f = [&](double x) { return kernel.phi(x) * std::cos(w * x); };
    double acc = f(0.0) + f(r);
    for (int i = 1; i < panels; ++i)
        acc += f(r * i / panels) * (i % 2 ? 4.0 : 2.0);
    return 2.0 * acc * (r / panels) / 3.0 / L;
}

}  // namespace

TEST_CASE("torus helpers wrap and measure as expected") {
    CHECK(wrap_position(10.0, 10.0) == doctest::Approx(0.0));
    CHECK(wrap_position(-0.25, 10.0) == doctest::Approx(9.75));
    CHECK(wrap_position(23.5, 10.0) == doctest::Approx(3.5));
    CHECK(torus_distance(0.5, 9.5, 10.0) == doctest::Approx(1.0));
    CHECK(torus_distance(2.0, 7.0, 10.0) == doctest::Approx(5.0));
    CHECK(torus_delta(9.5, 0.5, 10.0) == doctest::Approx(1.0));
    CHECK(torus_delta(0.5, 9.5, 10.0) == doctest::Approx(-1.0));
    // delta is the unique representative in [-L/2, L/2)
    CHECK(torus_delta(0.0, 5.0, 10.0) == doctest::Approx(-5.0));
}

TEST_CASE("top-hat kernel has derived amplitude and inclusive support") {
    KernelSpec kernel;
    kernel.r = 1.0;
    kernel.L = 10.0;
    CHECK(kernel.amplitude() == doctest::Approx(5.0));
    CHECK(kernel.phi(0.0) == doctest::Approx(5.0));
    CHECK(kernel.phi(1.0) == doctest::Approx(5.0));  // boundary included
    CHECK(kernel.phi(1.0 + 1e-12) == 0.0);
    CHECK(kernel.phi(5.0) == 0.0);

    kernel.r = 2.5;
    CHECK(kernel.amplitude() == doctest::Approx(2.0));

    KernelSpec bad = kernel;
    bad.r = 5.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.r = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("kernel Fourier coefficients match numerical integration") {
    KernelSpec kernel;
    kernel.r = 1.0;
    kernel.L = 10.0;
    CHECK(kernel.fourier_coefficient(0) == doctest::Approx(1.0));
    for (int k = 1; k <= 6; ++k)
        CHECK(kernel.fourier_coefficient(k) ==
              doctest::Approx(simpson_fourier(kernel, k)).epsilon(1e-9));
    // multiples of 5 are the sinc zeros at r=1, L=10
    CHECK(std::fabs(kernel.fourier_coefficient(5)) < 1e-15);

    kernel.r = 1.7;
    for (int k = 1; k <= 4; ++k)
        CHECK(kernel.fourier_coefficient(k) ==
              doctest::Approx(simpson_fourier(kernel, k)).epsilon(1e-9));

    KernelSpec flat;
    flat.variant = KernelVariant::uniform;
    flat.L = 10.0;
    CHECK(flat.phi(4.9) == doctest::Approx(1.0));
    CHECK(flat.fourier_coefficient(0) == doctest::Approx(1.0));
    CHECK(flat.fourier_coefficient(3) == 0.0);
}

TEST_CASE("cubic G has the closed-form ordered roots") {
    GSpec g;
    g.variant = GVariant::cubic;
    g.h = 6.0;
    const double xi_e = 5.0 * std::sqrt((g.h - 4.0) / g.h);
    CHECK(xi_e == doctest::Approx(2.8867513459481287));
    CHECK(g(xi_e) == doctest::Approx(xi_e).epsilon(1e-14));
    CHECK(g(-2.0) == doctest::Approx(-g(2.0)));
    CHECK(g.prime(0.0) == doctest::Approx((g.h + 1.0) / 5.0));

    // derivative against central differences
    for (double u : {-3.0, -0.7, 0.0, 1.3, 2.8867513459481287}) {
        const double fd = (g(u + 1e-6) - g(u - 1e-6)) / 2e-6;
        CHECK(g.prime(u) == doctest::Approx(fd).epsilon(1e-8));
    }

    auto roots = compatibility_roots(g, -10.0, 10.0);
    REQUIRE(roots.size() == 3);
    CHECK(roots[0] == doctest::Approx(-xi_e).epsilon(1e-9));
    CHECK(roots[1] == 0.0);
    CHECK(roots[2] == doctest::Approx(xi_e).epsilon(1e-9));
    CHECK(ordered_state_root(g) == doctest::Approx(xi_e).epsilon(1e-9));

    g.h = 2.0;  // no ordered branch below h = 4
    auto only_zero = compatibility_roots(g, -10.0, 10.0);
    REQUIRE(only_zero.size() == 1);
    CHECK(only_zero[0] == 0.0);
    CHECK(ordered_state_root(g) == 0.0);
}

TEST_CASE("odd-polynomial coefficients reproduce the cubic variant") {
    GSpec cubic;
    cubic.variant = GVariant::cubic;
    cubic.h = 6.0;
    GSpec poly;
    poly.variant = GVariant::odd_polynomial;
    poly.coeffs = {7.0 / 5.0, -6.0 / 125.0};
    for (double u : {-4.0, -1.1, 0.0, 0.3, 2.5, 5.0}) {
        CHECK(poly(u) == doctest::Approx(cubic(u)).epsilon(1e-14));
        CHECK(poly.prime(u) == doctest::Approx(cubic.prime(u)).epsilon(1e-14));
    }
    GSpec empty = poly;
    empty.coeffs.clear();
    CHECK_THROWS_AS(empty.validate(), std::invalid_argument);
}

TEST_CASE("tanh gain variant and its fixed point") {
    GSpec g;
    g.variant = GVariant::tanh_gain;
    g.a = 2.0;
    CHECK(g(0.7) == doctest::Approx(2.0 * std::tanh(0.7)));
    CHECK(g.prime(0.0) == doctest::Approx(2.0));
    const double root = ordered_state_root(g);
    CHECK(root == doctest::Approx(1.915008).epsilon(1e-5));
    CHECK(g(root) == doctest::Approx(root).epsilon(1e-8));
}

TEST_CASE("stationary state velocity marginal is a unit-mass Gaussian") {
    StationaryState rho(2.0, 1.5, 10.0);
    // trapezoid over +-10 standard deviations
    const double sd = 1.5 / std::sqrt(2.0);
    double mass = 0.0, mean = 0.0;
    const int steps = 20000;
    const double lo = 2.0 - 10.0 * sd, hi = 2.0 + 10.0 * sd;
    for (int i = 0; i <= steps; ++i) {
        const double u = lo + (hi - lo) * i / steps;
        const double w = (i == 0 || i == steps) ? 0.5 : 1.0;
        mass += w * rho.velocity_marginal(u);
        mean += w * u * rho.velocity_marginal(u);
    }
    mass *= (hi - lo) / steps;
    mean *= (hi - lo) / steps;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(mean == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(rho.density(3.3, 1.0) ==
          doctest::Approx(rho.velocity_marginal(1.0) / 10.0));
    CHECK_THROWS_AS(StationaryState(0.0, 0.0, 10.0), std::invalid_argument);
}

TEST_CASE("neighbor average: pinned four-agent configuration") {
    // Agent at x=9 sees itself (weight 5) and the agent at x=0 (torus
    // distance exactly 1, boundary included): (1/4)(1*5 + 4*5) = 6.25.
    ModelParams p = base_params();
    p.n = 4;
    SwarmState s;
    s.x = {0.0, 1.5, 5.0, 9.0};
    s.u = {1.0, 2.0, 3.0, 4.0};
    auto avg = neighbor_average(s, p);
    REQUIRE(avg.size() == 4);
    CHECK(avg[3] == doctest::Approx(6.25).epsilon(1e-14));
    // x=0 likewise pairs with x=9; x=1.5 and x=5 only see themselves.
    CHECK(avg[0] == doctest::Approx((5.0 * 1.0 + 5.0 * 4.0) / 4.0));
    CHECK(avg[1] == doctest::Approx(5.0 * 2.0 / 4.0));
    CHECK(avg[2] == doctest::Approx(5.0 * 3.0 / 4.0));
}

TEST_CASE("neighbor average: single agent sees only itself") {
    ModelParams p = base_params();
    p.n = 1;
    SwarmState s;
    s.x = {3.0};
    s.u = {2.0};
    auto avg = neighbor_average(s, p);
    REQUIRE(avg.size() == 1);
    CHECK(avg[0] == doctest::Approx(5.0 * 2.0).epsilon(1e-14));
}

TEST_CASE("neighbor average: cell list equals direct summation") {
    Rng rng(20260814);
    for (int trial = 0; trial < 100; ++trial) {
        ModelParams p = base_params();
        p.n = 2 + static_cast<long>(rng.uniform() * 399);
        p.kernel.r = 0.05 + rng.uniform() * 4.95;  // spans both code paths
        if (trial % 3 == 1) p.averaging = Averaging::normalized;
        SwarmState s;
        s.x.resize(p.n);
        s.u.resize(p.n);
        for (long i = 0; i < p.n; ++i) {
            s.x[i] = 10.0 * rng.uniform();
            s.u[i] = 4.0 * rng.normal();
        }
        auto fast = neighbor_average(s, p);
        auto direct = neighbor_average_direct(s, p);
        double worst = 0.0;
        for (long i = 0; i < p.n; ++i) {
            const double scale = std::max(1.0, std::fabs(direct[i]));
            worst = std::max(worst, std::fabs(fast[i] - direct[i]) / scale);
        }
        CHECK(worst <= 1e-12);
    }
}

TEST_CASE("normalized averaging divides by the local weight sum") {
    ModelParams p = base_params();
    p.n = 2;
    p.averaging = Averaging::normalized;
    SwarmState s;
    s.x = {2.0, 2.5};
    s.u = {1.0, -0.5};
    auto avg = neighbor_average(s, p);
    CHECK(avg[0] == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(avg[1] == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("euler step: hand-computed noiseless update") {
    ModelParams p = base_params();
    p.n = 2;
    p.sigma = 0.0;
    p.dt = 0.1;
    SwarmState s;
    s.x = {2.0, 2.5};
    s.u = {1.0, -0.5};
    Rng rng(7);
    SwarmState next = euler_step(s, p, rng);

    // <u> = (5*1.0 + 5*(-0.5))/2 = 1.25 for both agents,
    // G(1.25) = 1.4*1.25 - 0.048*1.25^3 = 1.65625.
    CHECK(next.u[0] == doctest::Approx(1.0 + (1.65625 - 1.0) * 0.1)
                           .epsilon(1e-14));
    CHECK(next.u[1] == doctest::Approx(-0.5 + (1.65625 + 0.5) * 0.1)
                           .epsilon(1e-14));
    // positions advance with the pre-update velocities
    CHECK(next.x[0] == doctest::Approx(2.1).epsilon(1e-14));
    CHECK(next.x[1] == doctest::Approx(2.45).epsilon(1e-14));
    CHECK(next.t == doctest::Approx(0.1));
}

TEST_CASE("euler step wraps positions back into [0, L)") {
    ModelParams p = base_params();
    p.n = 2;
    p.sigma = 0.0;
    p.dt = 0.5;
    SwarmState s;
    s.x = {9.9, 0.2};
    s.u = {1.0, -1.0};
    Rng rng(7);
    SwarmState next = euler_step(s, p, rng);
    CHECK(next.x[0] == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(next.x[1] == doctest::Approx(9.7).epsilon(1e-12));
}

TEST_CASE("simulate is deterministic in the seed") {
    ModelParams p = base_params();
    p.n = 40;
    p.sigma = 1.0;
    p.steps = 300;
    p.seed = 99;
    Rng init_rng(derive_seed(p.seed, 1234ull));
    SwarmState init = sample_initial(1.0, p, init_rng);
    Observers obs;
    obs.snapshot_stride = 50;
    RunSeries a = simulate(p, init, obs);
    RunSeries b = simulate(p, init, obs);
    REQUIRE(a.times.size() == b.times.size());
    REQUIRE(a.times.size() == static_cast<std::size_t>(p.steps) + 1);
    CHECK(a.mean_velocity == b.mean_velocity);
    CHECK(a.discrepancy == b.discrepancy);
    REQUIRE(a.position_snapshots.size() == b.position_snapshots.size());
    for (std::size_t i = 0; i < a.position_snapshots.size(); ++i)
        CHECK(a.position_snapshots[i].second ==
              b.position_snapshots[i].second);

    ModelParams q = p;
    q.seed = 100;
    RunSeries c = simulate(q, init, obs);
    CHECK(a.mean_velocity.back() != c.mean_velocity.back());
}

TEST_CASE("simulate keeps every position inside the torus") {
    ModelParams p = base_params();
    p.n = 60;
    p.sigma = 3.0;
    p.steps = 400;
    p.seed = 5;
    Rng init_rng(11);
    SwarmState init = sample_initial(0.0, p, init_rng);
    Observers obs;
    obs.snapshot_stride = 20;
    RunSeries s = simulate(p, init, obs);
    for (const auto& [t, xs] : s.position_snapshots)
        for (double x : xs) {
            CHECK(x >= 0.0);
            CHECK(x < 10.0);
        }
}

TEST_CASE("sample_initial has the stationary moments") {
    ModelParams p = base_params();
    p.n = 200000;
    p.sigma = 1.5;
    Rng rng(42);
    SwarmState s = sample_initial(2.0, p, rng);
    REQUIRE(s.x.size() == 200000);
    double mu = 0.0;
    for (double u : s.u) mu += u;
    mu /= static_cast<double>(p.n);
    double var = 0.0;
    for (double u : s.u) var += (u - mu) * (u - mu);
    var /= static_cast<double>(p.n - 1);
    const double target_var = 1.5 * 1.5 / 2.0;
    // 5 standard errors of the mean / variance estimators
    CHECK(std::fabs(mu - 2.0) < 5.0 * std::sqrt(target_var / p.n));
    CHECK(std::fabs(var - target_var) <
          5.0 * target_var * std::sqrt(2.0 / p.n));
    double xbar = 0.0;
    for (double x : s.x) {
        CHECK(x >= 0.0);
        CHECK(x < 10.0);
        xbar += x;
    }
    xbar /= static_cast<double>(p.n);
    CHECK(std::fabs(xbar - 5.0) < 5.0 * 10.0 / std::sqrt(12.0 * p.n));
}

TEST_CASE("uniform kernel reduces to the exact mean-field recurrence") {
    // With phi identically 1 every agent sees the global mean, so u-bar
    // obeys u' = u + (G(u) - u) dt exactly, independent of positions.
    ModelParams p = base_params();
    p.n = 137;
    p.sigma = 0.0;
    p.steps = 250;
    p.kernel.variant = KernelVariant::uniform;
    SwarmState s;
    s.x.resize(p.n);
    s.u.resize(p.n);
    Rng rng(3);
    for (long i = 0; i < p.n; ++i) {
        s.x[i] = 10.0 * rng.uniform();
        s.u[i] = 1.0 + 2.0 * rng.normal();
    }
    Observers obs;
    obs.discrepancy = false;
    RunSeries series = simulate(p, s, obs);

    double ubar = series.mean_velocity.front();
    GSpec g = p.g;
    for (std::size_t i = 1; i < series.mean_velocity.size(); ++i) {
        ubar += (g(ubar) - ubar) * p.dt;
        CHECK(series.mean_velocity[i] == doctest::Approx(ubar).epsilon(1e-10));
    }

    // the ordered root is an exact fixed point of that recurrence
    const double xi_e = ordered_state_root(g);
    SwarmState at_root = s;
    at_root.u.assign(p.n, xi_e);
    RunSeries fixed = simulate(p, at_root, obs);
    for (double ub : fixed.mean_velocity)
        CHECK(std::fabs(ub - xi_e) < 1e-10);
}

TEST_CASE("model parameter validation rejects bad values") {
    ModelParams p = base_params();
    p.n = 0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = base_params();
    p.dt = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = base_params();
    p.sigma = -1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = base_params();
    p.kernel.L = 9.0;  // torus length mismatch
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}
