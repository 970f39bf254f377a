#include "czirok/stability.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gauss.hpp"

namespace czirok {

namespace {

constexpr double kTailTarget = 1e-10;   // truncation criterion
constexpr double kMarginMin = 1e-6;     // admissibility margin on Re(gamma)
constexpr double kNewtonAccept = 3e-8;  // residual |L-1| for a valid root
constexpr int kMaxPanels = 30000;

struct PairVal {
    Complex L{0.0, 0.0};
    Complex dL{0.0, 0.0};
};

enum class LapStatus { ok, margin, no_converge };

// Fused evaluation of R_k(t) e^{-gamma t}: bracket * exp(combined exponent).
// Splitting the two exponentials overflows for decaying gamma at large t.
struct Integrand {
    double pref;  // G'(xi) phi_k
    double s2;    // sigma^2
    double Dk;
    double xi;
    double c;  // sigma^2 Dk^2 / 2
    Complex gamma;

    void eval(double t, Complex& f, Complex& tf) const {
        const double em = std::exp(-t);
        const double beta = Dk * (1.0 - em);
        const Complex bracket(-0.5 * s2 * beta * beta + em, xi * beta);
        const double ere = 0.5 * s2 * Dk * beta - (c + gamma.real()) * t;
        const double eim = (xi * Dk - gamma.imag()) * t;
        f = pref * bracket * std::exp(Complex(ere, eim));
        tf = -t * f;
    }
};

// |R_k(t)| <= pref_env * e^{-c t} for all t >= 0: the bracket is bounded by
// c + |xi Dk| + 1 and the exponent's real part by c(1 - e^-t) - c t.
double envelope_constant(const ModeContext& ctx) {
    const double c = 0.5 * ctx.sigma * ctx.sigma * ctx.Dk * ctx.Dk;
    return std::fabs(ctx.gp * ctx.phik) *
           (c + std::fabs(ctx.xi * ctx.Dk) + 1.0) * std::exp(c);
}

LapStatus laplace_core(const ModeContext& ctx, Complex gamma, PairVal& out) {
    const double s2 = ctx.sigma * ctx.sigma;
    const double c = 0.5 * s2 * ctx.Dk * ctx.Dk;
    const double rate = c + gamma.real();
    if (rate < kMarginMin) return LapStatus::margin;

    if (ctx.gp * ctx.phik == 0.0) {
        out = PairVal{};
        return LapStatus::ok;
    }

    const double env = envelope_constant(ctx);
    double T = std::max(1.0, 40.0 / (s2 * ctx.Dk * ctx.Dk));
    int doublings = 0;
    while (env * std::exp(-rate * T) / rate > kTailTarget) {
        T *= 2.0;
        if (++doublings > 80) return LapStatus::no_converge;
    }
    // Stop integrating once the envelope tail drops below 1e-14; the
    // remainder is far inside the error budget.
    const double t_cut =
        (std::log(std::max(env, 1e-300)) - std::log(1e-14 * rate)) / rate;
    const double T_eff = std::clamp(t_cut, 1.0, T);

    const Integrand f{ctx.gp * ctx.phik, s2, ctx.Dk, ctx.xi, c, gamma};
    const double omega =
        std::fabs(ctx.xi * ctx.Dk - gamma.imag()) + std::fabs(ctx.xi) * ctx.Dk + 1.0;
    const double width =
        std::min({25.0 / omega, 10.0 / std::max(1.0, c), 2.0, T_eff});

    struct Seg {
        double a, b;
        int depth;
    };
    std::vector<Seg> stack;
    const int n0 = static_cast<int>(std::ceil(T_eff / width));
    stack.reserve(n0 + 64);
    for (int i = n0; i-- > 0;) {
        double a = T_eff * i / n0;
        double b = T_eff * (i + 1) / n0;
        stack.push_back({a, b, 0});
    }

    PairVal total;
    int panels = 0;
    while (!stack.empty()) {
        if (++panels > kMaxPanels) return LapStatus::no_converge;
        Seg seg = stack.back();
        stack.pop_back();
        const double mid = 0.5 * (seg.a + seg.b);
        const double half = 0.5 * (seg.b - seg.a);

        Complex L16{}, D16{}, L8{};
        for (int i = 0; i < detail::kGL16; ++i) {
            const double d = half * detail::kGL16Node[i];
            Complex fa, ta, fb, tb;
            f.eval(mid - d, fa, ta);
            f.eval(mid + d, fb, tb);
            L16 += detail::kGL16Weight[i] * (fa + fb);
            D16 += detail::kGL16Weight[i] * (ta + tb);
        }
        for (int i = 0; i < detail::kGL8; ++i) {
            const double d = half * detail::kGL8Node[i];
            Complex fa, ta, fb, tb;
            f.eval(mid - d, fa, ta);
            f.eval(mid + d, fb, tb);
            L8 += detail::kGL8Weight[i] * (fa + fb);
        }
        L16 *= half;
        D16 *= half;
        L8 *= half;

        const double err = std::abs(L16 - L8);
        if (err <= 2e-12 * (1.0 + std::abs(L16)) || seg.depth >= 26 ||
            seg.b - seg.a < 1e-12) {
            total.L += L16;
            total.dL += D16;
        } else {
            stack.push_back({mid, seg.b, seg.depth + 1});
            stack.push_back({seg.a, mid, seg.depth + 1});
        }
    }
    out = total;
    return LapStatus::ok;
}

bool laplace_pair(const ModeContext& ctx, Complex gamma, PairVal& out) {
    return laplace_core(ctx, gamma, out) == LapStatus::ok;
}

void check_mode(const ModeContext& ctx) {
    if (ctx.k == 0)
        throw std::invalid_argument("mode analysis rejects k = 0");
    if (!(ctx.sigma > 0.0))
        throw std::invalid_argument("mode analysis needs sigma > 0");
}

// Damped Newton on laplace_R(gamma) = 1, confined to the admissible strip.
std::optional<Complex> newton_root(const ModeContext& ctx, Complex g0) {
    PairVal p;
    if (!laplace_pair(ctx, g0, p)) return std::nullopt;
    Complex g = g0;
    Complex fval = p.L - 1.0;
    for (int it = 0; it < 50; ++it) {
        if (std::abs(fval) < 1e-9) return g;
        if (p.dL == Complex(0.0, 0.0) || !std::isfinite(std::abs(p.dL)))
            return std::nullopt;
        const Complex step = -fval / p.dL;
        double lam = 1.0;
        bool improved = false;
        Complex gn, fn;
        PairVal pn;
        for (int bt = 0; bt < 8; ++bt) {
            gn = g + lam * step;
            if (std::abs(gn) > 1e3 || !laplace_pair(ctx, gn, pn)) {
                lam *= 0.5;
                continue;
            }
            fn = pn.L - 1.0;
            if (std::abs(fn) < std::abs(fval)) {
                improved = true;
                break;
            }
            lam *= 0.5;
        }
        if (!improved)
            return std::abs(fval) <= kNewtonAccept ? std::optional<Complex>(g)
                                                   : std::nullopt;
        const bool tiny = std::abs(lam * step) < 1e-13 * (1.0 + std::abs(gn));
        g = gn;
        fval = fn;
        p = pn;
        if (tiny)
            return std::abs(fval) <= kNewtonAccept ? std::optional<Complex>(g)
                                                   : std::nullopt;
    }
    return std::abs(fval) <= kNewtonAccept ? std::optional<Complex>(g)
                                           : std::nullopt;
}

struct SearchOutcome {
    std::vector<Complex> roots;  // deduplicated, any sign of Re
    bool converged_any = false;
};

void sort_dominant_first(std::vector<Complex>& roots) {
    std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
        if (a.real() != b.real()) return a.real() > b.real();
        if (std::fabs(a.imag()) != std::fabs(b.imag()))
            return std::fabs(a.imag()) > std::fabs(b.imag());
        return a.imag() > b.imag();
    });
}

SearchOutcome run_grid(const ModeContext& ctx, const SearchRect& rect,
                       double tol) {
    SearchOutcome out;
    const int n_re = std::max(1, rect.n_re);
    const int n_im = std::max(1, rect.n_im);
    for (int i = 0; i < n_re; ++i) {
        double re;
        if (rect.re_lo > 0.0 && rect.re_hi > rect.re_lo) {
            // log-spaced starts resolve the small-growth-rate region
            const double f = n_re > 1 ? static_cast<double>(i) / (n_re - 1) : 0.0;
            re = rect.re_lo * std::pow(rect.re_hi / rect.re_lo, f);
        } else {
            re = n_re > 1 ? rect.re_lo +
                                (rect.re_hi - rect.re_lo) * i / (n_re - 1.0)
                          : rect.re_lo;
        }
        for (int j = 0; j < n_im; ++j) {
            const double im =
                n_im > 1
                    ? rect.im_lo + (rect.im_hi - rect.im_lo) * j / (n_im - 1.0)
                    : rect.im_lo;
            auto root = newton_root(ctx, Complex(re, im));
            if (!root) continue;
            out.converged_any = true;
            bool dup = false;
            for (Complex r : out.roots)
                if (std::abs(*root - r) <= tol) {
                    dup = true;
                    break;
                }
            if (!dup) out.roots.push_back(*root);
        }
    }
    sort_dominant_first(out.roots);
    return out;
}

}  // namespace

ModeContext make_mode_context(const GSpec& g, double xi,
                              const KernelSpec& kernel, double sigma, int k) {
    ModeContext ctx;
    ctx.k = k;
    ctx.Dk = 2.0 * M_PI * k / kernel.L;
    ctx.xi = xi;
    ctx.sigma = sigma;
    ctx.gp = g.prime(xi);
    ctx.phik = kernel.fourier_coefficient(k);
    return ctx;
}

Complex mode_kernel_R(const ModeContext& ctx, double t) {
    check_mode(ctx);
    if (t < 0.0) throw std::invalid_argument("mode_kernel_R: t >= 0");
    const Integrand f{ctx.gp * ctx.phik,
                      ctx.sigma * ctx.sigma,
                      ctx.Dk,
                      ctx.xi,
                      0.5 * ctx.sigma * ctx.sigma * ctx.Dk * ctx.Dk,
                      Complex(0.0, 0.0)};
    Complex v, tv;
    f.eval(t, v, tv);
    return v;
}

Complex laplace_R(const ModeContext& ctx, Complex gamma) {
    check_mode(ctx);
    PairVal p;
    switch (laplace_core(ctx, gamma, p)) {
        case LapStatus::ok:
            return p.L;
        case LapStatus::margin:
            throw std::domain_error(
                "laplace_R: Re(gamma) too close to the decay boundary");
        case LapStatus::no_converge:
            throw std::runtime_error("laplace_R: quadrature did not converge");
    }
    return p.L;
}

SearchRect default_search_rect(const ModeContext& ctx) {
    SearchRect rect;
    const double span =
        2.0 * M_PI * std::abs(ctx.k) * std::max(1.0, std::fabs(ctx.xi));
    rect.im_lo = -span;
    rect.im_hi = span;
    return rect;
}

std::vector<Complex> resolvent_roots(const ModeContext& ctx,
                                     const SearchRect& rect, double tol) {
    check_mode(ctx);
    if (ctx.gp * ctx.phik == 0.0) return {};
    return run_grid(ctx, rect, tol).roots;
}

std::optional<Complex> refine_root(const ModeContext& ctx, Complex start) {
    check_mode(ctx);
    if (ctx.gp * ctx.phik == 0.0) return std::nullopt;
    return newton_root(ctx, start);
}

GrowthResult find_growth_roots(const ModeContext& ctx, const SearchRect& rect,
                               double tol) {
    check_mode(ctx);
    GrowthResult res;
    res.k = ctx.k;
    res.sufficient_bound_ok = sufficient_mode_bound(ctx);
    res.gamma_i = std::numeric_limits<double>::quiet_NaN();

    if (ctx.gp * ctx.phik == 0.0) {
        // transform is identically 0, never 1: stable with empty C_k
        res.status = RootStatus::no_roots;
        return res;
    }

    SearchOutcome out = run_grid(ctx, rect, tol);
    for (Complex r : out.roots)
        if (r.real() > 0.0) res.roots.push_back(r);
    if (!res.roots.empty()) {
        res.gamma_r = res.roots.front().real();
        res.gamma_i = res.roots.front().imag();
        res.status = RootStatus::found_roots;
    } else {
        res.status = out.converged_any ? RootStatus::no_roots
                                       : RootStatus::grid_exhausted;
    }
    return res;
}

bool zeroth_mode_stable(const GSpec& g, double xi) { return g.prime(xi) < 1.0; }

bool sufficient_mode_bound(const ModeContext& ctx) {
    check_mode(ctx);
    const double c = 0.5 * ctx.sigma * ctx.sigma * ctx.Dk * ctx.Dk;
    const double adk = std::fabs(ctx.Dk);
    const double rhs =
        1.0 / (1.0 + 3.0 * std::sqrt(2.0 * M_PI) / (ctx.sigma * adk) +
               3.0 * std::fabs(ctx.xi) / (0.5 * ctx.sigma * ctx.sigma * adk) +
               std::exp(-1.0) / (1.0 + c));
    return std::fabs(ctx.gp * ctx.phik) < rhs;
}

namespace {

// Dominant admissible root for one mode at one sigma, warm-started from the
// nearest previously tracked root; falls back to coarse grids. Used by
// critical_sigma so the bisection does not pay for full searches.
std::optional<Complex> tracked_dominant(const GSpec& g, double xi,
                                        const KernelSpec& kernel, double sigma,
                                        int k, std::optional<Complex>& track) {
    const ModeContext ctx = make_mode_context(g, xi, kernel, sigma, k);
    const double c = 0.5 * sigma * sigma * ctx.Dk * ctx.Dk;

    std::optional<Complex> best;
    if (track) {
        Complex start(*track);
        if (start.real() <= -c + 2.0 * kMarginMin)
            start = Complex(-c + 1e-3, start.imag());
        best = newton_root(ctx, start);
        if (best && best->real() > 0.0) {
            track = best;
            return best;
        }
    }
    // Either no warm root or it claims stability; confirm with coarse grids
    // over the growth half-plane and a strip of decaying starts.
    SearchRect pos = default_search_rect(ctx);
    pos.n_re = 6;
    pos.n_im = 16;
    SearchOutcome out = run_grid(ctx, pos, 1e-4);
    SearchRect neg;
    neg.re_lo = -0.9 * c;
    neg.re_hi = -1e-3 * c;
    neg.im_lo = pos.im_lo;
    neg.im_hi = pos.im_hi;
    neg.n_re = 4;
    neg.n_im = 12;
    SearchOutcome out2 = run_grid(ctx, neg, 1e-4);
    for (Complex r : out2.roots) out.roots.push_back(r);
    if (best) out.roots.push_back(*best);
    if (out.roots.empty()) {
        track.reset();
        return std::nullopt;
    }
    sort_dominant_first(out.roots);
    track = out.roots.front();
    return track;
}

}  // namespace

double critical_sigma(const GSpec& g, double xi, const KernelSpec& kernel,
                      int k_range, double tol) {
    if (!zeroth_mode_stable(g, xi))
        throw std::invalid_argument(
            "critical_sigma: 0th mode unstable at this state");
    if (k_range < 1) throw std::invalid_argument("critical_sigma: k_range >= 1");
    if (!(tol > 0.0)) throw std::invalid_argument("critical_sigma: tol > 0");

    std::vector<std::optional<Complex>> tracks(k_range + 1);
    auto unstable = [&](double sigma) {
        for (int k = 1; k <= k_range; ++k) {
            const ModeContext ctx = make_mode_context(g, xi, kernel, sigma, k);
            if (sufficient_mode_bound(ctx)) {
                tracks[k].reset();  // certified stable, nothing to track
                continue;
            }
            auto dom = tracked_dominant(g, xi, kernel, sigma, k, tracks[k]);
            if (dom && dom->real() > 0.0) return true;
        }
        return false;
    };

    // Descending power-of-two ladder over the scanned interval; the first
    // unstable point brackets the threshold against the previous stable one.
    double hi = 0.0, lo = 0.0;
    bool have_bracket = false;
    double prev = 0.0;
    bool prev_stable = false;
    for (double sigma = 25.6; sigma >= 0.05 / 2.0; sigma *= 0.5) {
        const bool uns = unstable(sigma);
        if (uns && prev_stable) {
            lo = sigma;
            hi = prev;
            have_bracket = true;
            break;
        }
        prev = sigma;
        prev_stable = !uns;
    }
    if (!have_bracket)
        throw std::runtime_error(
            "critical_sigma: no stability change in sigma within [0.05, 25.6]");

    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (unstable(mid))
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

std::optional<ModePrediction> most_unstable_mode(const GSpec& g, double xi,
                                                 const KernelSpec& kernel,
                                                 double sigma, int k_range) {
    if (k_range < 1)
        throw std::invalid_argument("most_unstable_mode: k_range >= 1");
    std::optional<ModePrediction> best;
    for (int k = 1; k <= k_range; ++k) {
        const ModeContext ctx = make_mode_context(g, xi, kernel, sigma, k);
        if (sufficient_mode_bound(ctx)) continue;  // certified stable
        GrowthResult res = find_growth_roots(ctx, default_search_rect(ctx));
        if (res.roots.empty()) continue;
        if (!best || res.gamma_r > best->gamma.real()) {
            ModePrediction p;
            p.k_max = k;
            p.gamma = res.roots.front();
            p.velocity = res.gamma_i * kernel.L / (2.0 * M_PI * k);
            best = p;
        }
    }
    return best;
}

double volterra_growth_check(const ModeContext& ctx, double horizon,
                             double dt) {
    check_mode(ctx);
    if (!(dt > 0.0) || !(horizon > 10.0 * dt))
        throw std::invalid_argument("volterra_growth_check: bad horizon/dt");

    const long n = std::lround(horizon / dt);
    const double s2 = ctx.sigma * ctx.sigma;
    const double c = 0.5 * s2 * ctx.Dk * ctx.Dk;

    std::vector<double> Rre(n + 1), Rim(n + 1), Pre(n + 1), Pim(n + 1);
    for (long m = 0; m <= n; ++m) {
        const double t = m * dt;
        const double em = std::exp(-t);
        const double beta = ctx.Dk * (1.0 - em);
        const Complex expf =
            std::exp(Complex(0.5 * s2 * ctx.Dk * beta - c * t, ctx.xi * ctx.Dk * t));
        const Complex bracket(-0.5 * s2 * beta * beta + em, ctx.xi * beta);
        const Complex R = ctx.gp * ctx.phik * bracket * expf;
        Rre[m] = R.real();
        Rim[m] = R.imag();
        // test perturbation rho_hat(0, eta) = exp(-eta^2/2) evaluated at
        // eta = -beta, with d/d eta g_k(t,0) = -s^2 Dk (1-e^-t)^2/2
        // + i xi (1-e^-t)
        const Complex dg(-0.5 * s2 * ctx.Dk * (1.0 - em) * (1.0 - em),
                         ctx.xi * (1.0 - em));
        const double rho = std::exp(-0.5 * beta * beta);
        const Complex psi = (-dg + Complex(beta * em, 0.0)) * rho * expf;
        Pre[m] = psi.real();
        Pim[m] = psi.imag();
    }

    std::vector<double> wre(n + 1), wim(n + 1);
    wre[0] = Pre[0];
    wim[0] = Pim[0];
    const double dre = 1.0 - 0.5 * dt * Rre[0];
    const double dim = -0.5 * dt * Rim[0];
    const double dnorm = dre * dre + dim * dim;
    for (long m = 1; m <= n; ++m) {
        double are = 0.5 * (Rre[m] * wre[0] - Rim[m] * wim[0]);
        double aim = 0.5 * (Rre[m] * wim[0] + Rim[m] * wre[0]);
        for (long j = 1; j < m; ++j) {
            const double rr = Rre[m - j];
            const double ri = Rim[m - j];
            are += rr * wre[j] - ri * wim[j];
            aim += rr * wim[j] + ri * wre[j];
        }
        const double num_re = Pre[m] + dt * are;
        const double num_im = Pim[m] + dt * aim;
        wre[m] = (num_re * dre + num_im * dim) / dnorm;
        wim[m] = (num_im * dre - num_re * dim) / dnorm;
        const double mag = wre[m] * wre[m] + wim[m] * wim[m];
        if (!std::isfinite(mag) || mag > 1e290 || mag < 1e-290)
            throw std::runtime_error(
                "volterra_growth_check: solution saturated (over/underflow)");
    }

    const long i0 = 2 * n / 3;
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    const double cnt = static_cast<double>(n - i0 + 1);
    for (long m = i0; m <= n; ++m) {
        const double t = m * dt;
        const double y = 0.5 * std::log(wre[m] * wre[m] + wim[m] * wim[m]);
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
    }
    return (cnt * sty - st * sy) / (cnt * stt - st * st);
}

}  // namespace czirok
