#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace czirok {

enum class GVariant { cubic, tanh_gain, odd_polynomial };

// Odd self-interaction force. cubic: G(u) = ((h+1)/5)u - (h/125)u^3,
// tanh_gain: G(u) = a tanh(u), odd_polynomial: sum of c_m u^(2m+1).
struct GSpec {
    GVariant variant = GVariant::cubic;
    double h = 6.0;
    double a = 2.0;
    std::vector<double> coeffs;  // coeffs[m] multiplies u^(2m+1)

    double operator()(double u) const;
    double prime(double u) const;
    void validate() const;  // throws std::invalid_argument
};

inline double g_prime(const GSpec& g, double xi) { return g.prime(xi); }

enum class KernelVariant { top_hat, uniform };

// Influence weight of torus distance, normalized so (1/L) * integral over
// one period equals 1. The top-hat amplitude L/(2r) is derived, never stored.
struct KernelSpec {
    KernelVariant variant = KernelVariant::top_hat;
    double r = 1.0;  // top-hat radius, 0 < r <= L/2
    double L = 10.0;

    double amplitude() const;
    double phi(double dist) const;  // dist in [0, L/2]
    double fourier_coefficient(int k) const;
    void validate() const;
};

enum class Averaging { symmetric, normalized };

struct ModelParams {
    long n = 100;
    double l = 10.0;
    double sigma = 1.0;
    double dt = 0.1;
    GSpec g;
    KernelSpec kernel;
    Averaging averaging = Averaging::symmetric;
    long steps = 2000;
    std::uint64_t seed = 1;

    void validate() const;
};

struct SwarmState {
    std::vector<double> x;  // positions in [0, L)
    std::vector<double> u;  // velocities
    double t = 0.0;

    std::size_t size() const { return x.size(); }
};

// Space-uniform state with Gaussian velocity profile around a compatibility
// root xi; the velocity marginal has mean xi and variance sigma^2/2.
struct StationaryState {
    double xi = 0.0;
    double sigma = 1.0;
    double L = 10.0;

    StationaryState(double xi_, double sigma_, double L_);
    double density(double x, double u) const;
    double velocity_marginal(double u) const;
};

// All roots of xi = G(xi) inside [lo, hi]: sign-change scan at resolution
// 1e-2 followed by bisection to tol. Output is exactly sign-symmetric and
// contains 0. Throws std::runtime_error when no root brackets exist.
std::vector<double> compatibility_roots(const GSpec& g, double lo, double hi,
                                        double tol = 1e-10);

// Largest compatibility root in [0, 10]; equals 0 when the ordered states
// do not exist (e.g. cubic with h <= 4).
double ordered_state_root(const GSpec& g);

}
