#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "czirok/series.hpp"

namespace czirok {

double mean_velocity(std::span<const double> u);
double mean_velocity(const SwarmState& state);

// Squared centered L2 discrepancy of x/L against the uniform distribution,
// evaluated by the closed double-sum form. O(N log N) via sorting; the
// direct O(N^2) variant is the oracle used in tests.
double centered_l2_discrepancy(std::span<const double> positions, double L);
double centered_l2_discrepancy_direct(std::span<const double> positions,
                                      double L);

// Expected discrepancy of N i.i.d. uniform points: 1/(6N).
double uniform_discrepancy_mean(long n);

// Wrapped-Gaussian kernel density on a uniform grid over [0, L); the result
// is normalized so its trapezoid integral is exactly 1.
std::vector<double> periodic_kde(std::span<const double> positions, double L,
                                 double bandwidth, int grid);

// Tracks the KDE argmax across snapshots, unwraps it through the periodic
// boundary by minimal displacement and returns the least-squares slope of
// peak position against time; empty when fewer than half the snapshots have
// a peak-to-mean ratio of at least 1.5 (no coherent cluster).
std::optional<double> cluster_velocity(
    const std::vector<std::pair<double, std::vector<double>>>& snapshots,
    double L, double bandwidth);

struct TransitionEvent {
    double time;
    int from;  // +1 or -1
    int to;
};

struct TransitionReport {
    long count = 0;
    std::vector<TransitionEvent> events;
    double enter_frac = 0.8;
    double exit_frac = 0.2;
    double xi_e = 0.0;
};

// Hysteresis detector on the mean-velocity series: the system occupies
// state +1/-1 once u-bar crosses +-enter_frac*xi_e and leaves only after
// crossing the opposite exit threshold -+exit_frac*xi_e. A transition is a
// change of occupied state; the initial entry does not count.
TransitionReport count_transitions(const RunSeries& series, double xi_e,
                                   double enter_frac, double exit_frac);
TransitionReport count_transitions(std::span<const double> times,
                                   std::span<const double> mean_u, double xi_e,
                                   double enter_frac, double exit_frac);

struct FluctuationResult {
    double empirical = 0.0;
    double predicted = 0.0;
    double z = 0.0;
};

using TestFunction = std::function<double(double x, double u)>;

// Draws `replicates` i.i.d. swarms of size n from the stationary state,
// forms Y = sqrt(n) (<mu_n, f> - <rho, f>) for both test functions and
// compares the empirical covariance against <rho, f1 f2> - <rho,f1><rho,f2>
// (tensor quadrature). z is the deviation in estimated standard errors; a
// deviation below quadrature precision reports z = 0 (deterministic case).
FluctuationResult fluctuation_covariance_test(double xi, double sigma,
                                              double L, const TestFunction& f1,
                                              const TestFunction& f2, long n,
                                              long replicates,
                                              std::uint64_t seed);

}
