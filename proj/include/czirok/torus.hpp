#pragma once

#include <cmath>

namespace czirok {

// Map any real coordinate into [0, L).
inline double wrap_position(double x, double L) {
    double w = x - L * std::floor(x / L);
    if (w >= L) w = 0.0;  // floor rounding can land exactly on L
    return w;
}

// Shortest arc length between two points of [0, L); never exceeds L/2.
inline double torus_distance(double a, double b, double L) {
    double d = std::fabs(a - b);
    return std::min(d, L - d);
}

// Signed minimal displacement from a to b, in [-L/2, L/2).
inline double torus_delta(double a, double b, double L) {
    double d = b - a;
    d -= L * std::round(d / L);
    return d;
}

}
