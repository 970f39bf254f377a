#pragma once

#include <complex>
#include <limits>
#include <optional>
#include <vector>

#include "czirok/model.hpp"

namespace czirok {

using Complex = std::complex<double>;

// Everything the modal analysis needs about one wavenumber k of the
// linearization around a stationary state xi.
struct ModeContext {
    int k = 1;
    double Dk = 0.0;  // 2 pi k / L
    double xi = 0.0;
    double sigma = 1.0;
    double gp = 0.0;    // G'(xi)
    double phik = 0.0;  // kernel Fourier coefficient
};

ModeContext make_mode_context(const GSpec& g, double xi,
                              const KernelSpec& kernel, double sigma, int k);

// Memory kernel of the modal renewal equation,
//   R_k(t) = G'(xi) phi_k (-s^2 b^2/2 + i xi b + e^-t)
//            * exp(s^2 Dk b/2 + i xi Dk t - s^2 Dk^2 t / 2)
// with b = Dk (1 - e^-t) and s = sigma. Rejects k = 0.
Complex mode_kernel_R(const ModeContext& ctx, double t);

// Adaptive quadrature of integral_0^inf R_k(t) e^{-gamma t} dt, truncated
// where the analytic envelope bound drops below 1e-10; absolute error
// <= 1e-8. Requires Re(gamma) > -sigma^2 Dk^2 / 2 + margin, else throws
// std::domain_error (no decay).
Complex laplace_R(const ModeContext& ctx, Complex gamma);

struct SearchRect {
    double re_lo = 1e-2;  // > 0 for growth-root searches
    double re_hi = 5.0;
    double im_lo = 0.0;
    double im_hi = 0.0;
    int n_re = 16;  // log-spaced start grid in Re
    int n_im = 32;  // linear in Im
};

// Re log-spaced in (0, 5], Im spanning +-2 pi |k| max(1, |xi|).
SearchRect default_search_rect(const ModeContext& ctx);

enum class RootStatus { found_roots, no_roots, grid_exhausted };

inline constexpr double kStableSentinel =
    -std::numeric_limits<double>::infinity();

struct GrowthResult {
    int k = 0;
    std::vector<Complex> roots;  // Re > 0, sorted dominant first
    double gamma_r = kStableSentinel;
    double gamma_i = 0.0;
    bool sufficient_bound_ok = false;
    RootStatus status = RootStatus::no_roots;
};

// Damped Newton launched from a grid over the rectangle; converged roots of
// laplace_R(gamma) = 1 with Re > 0, deduplicated at distance tol. Dominant
// = largest Re, ties by larger |Im|. status distinguishes "no roots" (some
// start converged, none unstable) from grid exhaustion.
GrowthResult find_growth_roots(const ModeContext& ctx, const SearchRect& rect,
                               double tol = 1e-4);

// Same search but keeping every admissible root, including decaying ones
// (Re <= 0); these govern the relaxation rate of stable modes.
std::vector<Complex> resolvent_roots(const ModeContext& ctx,
                                     const SearchRect& rect,
                                     double tol = 1e-4);

// Polishes a single root of laplace_R(gamma) = 1 from a warm start; empty
// when the iteration leaves the admissible strip or stalls. Lets callers
// continue a root branch across nearby parameter values.
std::optional<Complex> refine_root(const ModeContext& ctx, Complex start);

// 0th (spatially uniform) mode: stable iff G'(xi) < 1; equality counts as
// unstable (first moment grows linearly there).
bool zeroth_mode_stable(const GSpec& g, double xi);

// Closed-form sufficient criterion for integral |R_k| < 1, which rules out
// any root of the transform: |G'(xi) phi_k| below a bound that tightens
// with k and loosens with sigma.
bool sufficient_mode_bound(const ModeContext& ctx);

// Noise threshold: bisection on sigma of "all modes 1..k_range stable",
// scanning sigma in [0.05, 25.6] for a bracket first. Throws
// std::runtime_error when the scan finds no sign change.
double critical_sigma(const GSpec& g, double xi, const KernelSpec& kernel,
                      int k_range, double tol = 0.02);

struct ModePrediction {
    int k_max = 0;
    Complex gamma;
    double velocity = 0.0;  // gamma_i * L / (2 pi k_max)
};

// argmax of gamma_r(k) over 1..k_range with its rate and the implied
// pattern speed; empty when every mode is stable.
std::optional<ModePrediction> most_unstable_mode(const GSpec& g, double xi,
                                                 const KernelSpec& kernel,
                                                 double sigma, int k_range);

// Trapezoidal solution of w = psi + R * w (convolution) on [0, horizon]
// for a unit-Gaussian test perturbation; returns the least-squares slope
// of log |w| over the final third. Throws std::runtime_error on overflow
// or underflow saturation.
double volterra_growth_check(const ModeContext& ctx, double horizon = 80.0,
                             double dt = 0.01);

}
