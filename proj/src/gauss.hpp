#pragma once

// Gauss-Legendre nodes/weights on [-1, 1], positive half; nodes are
// symmetric and weights repeat.

namespace czirok::detail {

inline constexpr int kGL16 = 8;
inline constexpr double kGL16Node[kGL16] = {
    0.095012509837637454, 0.28160355077925892, 0.45801677765722737,
    0.61787624440264377,  0.755404408355003,   0.86563120238783176,
    0.9445750230732326,   0.98940093499164994,
};
inline constexpr double kGL16Weight[kGL16] = {
    0.18945061045506859,  0.18260341504492361,  0.16915651939500262,
    0.14959598881657676,  0.12462897125553403,  0.095158511682492591,
    0.062253523938647706, 0.027152459411754037,
};

inline constexpr int kGL8 = 4;
inline constexpr double kGL8Node[kGL8] = {
    0.18343464249564978, 0.52553240991632899, 0.79666647741362673,
    0.96028985649753618,
};
inline constexpr double kGL8Weight[kGL8] = {
    0.36268378337836177, 0.31370664587788705, 0.22238103445337434,
    0.10122853629037669,
};

// Integrates f over [a, b] with one 16-point panel.
template <typename F>
auto gl16(const F& f, double a, double b) -> decltype(f(0.0)) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    decltype(f(0.0)) acc{};
    for (int i = 0; i < kGL16; ++i) {
        const double d = half * kGL16Node[i];
        acc += kGL16Weight[i] * (f(mid - d) + f(mid + d));
    }
    return half * acc;
}

template <typename F>
auto gl8(const F& f, double a, double b) -> decltype(f(0.0)) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    decltype(f(0.0)) acc{};
    for (int i = 0; i < kGL8; ++i) {
        const double d = half * kGL8Node[i];
        acc += kGL8Weight[i] * (f(mid - d) + f(mid + d));
    }
    return half * acc;
}

}  // namespace czirok::detail
