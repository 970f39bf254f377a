#include "czirok/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "czirok/rng.hpp"
#include "czirok/torus.hpp"
#include "gauss.hpp"

namespace czirok {

double mean_velocity(std::span<const double> u) {
    if (u.empty()) throw std::invalid_argument("mean_velocity: empty input");
    return std::accumulate(u.begin(), u.end(), 0.0) /
           static_cast<double>(u.size());
}

double mean_velocity(const SwarmState& state) { return mean_velocity(state.u); }

// Closed form on t_i = x_i/L with a_i = |t_i - 1/2|:
//   13/12 - (1/N) sum_i (2 + a_i - a_i^2)
//         + (1/2N^2) sum_ij (2 + a_i + a_j - |t_i - t_j|)
double centered_l2_discrepancy_direct(std::span<const double> positions,
                                      double L) {
    const std::size_t n = positions.size();
    if (n == 0) throw std::invalid_argument("discrepancy: empty input");
    double s1 = 0.0;
    double s2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double ti = positions[i] / L;
        const double ai = std::fabs(ti - 0.5);
        s1 += 2.0 + ai - ai * ai;
        for (std::size_t j = 0; j < n; ++j) {
            const double tj = positions[j] / L;
            const double aj = std::fabs(tj - 0.5);
            s2 += 2.0 + ai + aj - std::fabs(ti - tj);
        }
    }
    const double N = static_cast<double>(n);
    return 13.0 / 12.0 - s1 / N + s2 / (2.0 * N * N);
}

double centered_l2_discrepancy(std::span<const double> positions, double L) {
    const std::size_t n = positions.size();
    if (n == 0) throw std::invalid_argument("discrepancy: empty input");
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = positions[i] / L;
    std::sort(t.begin(), t.end());

    double sum_a = 0.0;
    double s1 = 0.0;
    double sum_abs = 0.0;  // sum_ij |t_i - t_j| via sorted prefix identity
    const double N = static_cast<double>(n);
    for (std::size_t m = 0; m < n; ++m) {
        const double a = std::fabs(t[m] - 0.5);
        sum_a += a;
        s1 += 2.0 + a - a * a;
        sum_abs += (2.0 * static_cast<double>(m) + 1.0 - N) * t[m];
    }
    sum_abs *= 2.0;
    const double s2 = 2.0 * N * N + 2.0 * N * sum_a - sum_abs;
    return 13.0 / 12.0 - s1 / N + s2 / (2.0 * N * N);
}

double uniform_discrepancy_mean(long n) {
    if (n < 1) throw std::invalid_argument("uniform_discrepancy_mean: n >= 1");
    return 1.0 / (6.0 * static_cast<double>(n));
}

std::vector<double> periodic_kde(std::span<const double> positions, double L,
                                 double bandwidth, int grid) {
    if (!(bandwidth > 0.0)) throw std::invalid_argument("kde: bandwidth > 0");
    if (grid < 16) throw std::invalid_argument("kde: grid >= 16");
    if (positions.empty()) throw std::invalid_argument("kde: empty input");

    const int images = 1 + static_cast<int>(std::ceil(6.0 * bandwidth / L));
    const double inv2b2 = 1.0 / (2.0 * bandwidth * bandwidth);
    std::vector<double> density(grid, 0.0);
    for (int j = 0; j < grid; ++j) {
        const double gx = L * static_cast<double>(j) / grid;
        double acc = 0.0;
        for (double x : positions) {
            const double d0 = torus_delta(gx, x, L);
            for (int m = -images; m <= images; ++m) {
                const double d = d0 + m * L;
                acc += std::exp(-d * d * inv2b2);
            }
        }
        density[j] = acc;
    }
    // Normalize by the trapezoid mass (equals the rectangle sum on a
    // periodic grid) so the integral is exactly 1 for any bandwidth/grid.
    double mass = std::accumulate(density.begin(), density.end(), 0.0) *
                  (L / grid);
    for (double& d : density) d /= mass;
    return density;
}

namespace {

// Quadratic refinement of an argmax on a periodic grid.
double refine_peak(const std::vector<double>& y, int jmax, double cell) {
    const int n = static_cast<int>(y.size());
    const double ym = y[(jmax - 1 + n) % n];
    const double y0 = y[jmax];
    const double yp = y[(jmax + 1) % n];
    const double denom = ym - 2.0 * y0 + yp;
    double off = 0.0;
    if (denom < 0.0) off = 0.5 * (ym - yp) / denom;
    if (off > 0.5) off = 0.5;
    if (off < -0.5) off = -0.5;
    return (static_cast<double>(jmax) + off) * cell;
}

}  // namespace

std::optional<double> cluster_velocity(
    const std::vector<std::pair<double, std::vector<double>>>& snapshots,
    double L, double bandwidth) {
    if (snapshots.size() < 10)
        throw std::invalid_argument("cluster_velocity: need >= 10 snapshots");
    if (snapshots.back().first - snapshots.front().first < 5.0)
        throw std::invalid_argument(
            "cluster_velocity: snapshots must span >= 5 time units");

    const int grid = 256;
    const double cell = L / grid;
    const std::size_t count = snapshots.size();
    std::vector<double> ts(count);
    std::vector<double> peaks(count);
    std::size_t coherent = 0;
    double unwrapped = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        auto density = periodic_kde(snapshots[i].second, L, bandwidth, grid);
        const auto it = std::max_element(density.begin(), density.end());
        const int jmax = static_cast<int>(it - density.begin());
        const double peak = refine_peak(density, jmax, cell);
        // After normalization the mean density is 1/L, so the
        // peak-to-mean ratio is just peak * L.
        if (*it * L >= 1.5) ++coherent;
        if (i == 0)
            unwrapped = peak;
        else
            unwrapped += torus_delta(wrap_position(unwrapped, L), peak, L);
        ts[i] = snapshots[i].first;
        peaks[i] = unwrapped;
    }
    if (2 * coherent <= count) return std::nullopt;  // no coherent cluster

    // Least-squares slope of unwrapped peak position vs time.
    const double n = static_cast<double>(ts.size());
    const double mt = std::accumulate(ts.begin(), ts.end(), 0.0) / n;
    const double mp = std::accumulate(peaks.begin(), peaks.end(), 0.0) / n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        sxx += (ts[i] - mt) * (ts[i] - mt);
        sxy += (ts[i] - mt) * (peaks[i] - mp);
    }
    return sxy / sxx;
}

TransitionReport count_transitions(std::span<const double> times,
                                   std::span<const double> mean_u, double xi_e,
                                   double enter_frac, double exit_frac) {
    if (!(xi_e > 0.0))
        throw std::invalid_argument("count_transitions: xi_e must be > 0");
    if (!(exit_frac > 0.0 && exit_frac < enter_frac && enter_frac <= 1.0))
        throw std::invalid_argument(
            "count_transitions: need 0 < exit_frac < enter_frac <= 1");
    if (times.size() != mean_u.size())
        throw std::invalid_argument("count_transitions: length mismatch");

    TransitionReport rep;
    rep.enter_frac = enter_frac;
    rep.exit_frac = exit_frac;
    rep.xi_e = xi_e;
    const double enter = enter_frac * xi_e;
    const double exit = exit_frac * xi_e;

    int occ = 0;       // currently occupied state
    int last_occ = 0;  // last state ever occupied
    for (std::size_t i = 0; i < mean_u.size(); ++i) {
        const double u = mean_u[i];
        if (occ == +1 && u <= -exit) occ = 0;
        else if (occ == -1 && u >= exit) occ = 0;
        if (occ == 0) {
            int enter_state = 0;
            if (u >= enter) enter_state = +1;
            else if (u <= -enter) enter_state = -1;
            if (enter_state != 0) {
                if (last_occ != 0 && enter_state != last_occ) {
                    ++rep.count;
                    rep.events.push_back({times[i], last_occ, enter_state});
                }
                occ = enter_state;
                last_occ = enter_state;
            }
        }
    }
    return rep;
}

TransitionReport count_transitions(const RunSeries& series, double xi_e,
                                   double enter_frac, double exit_frac) {
    return count_transitions(series.times, series.mean_velocity, xi_e,
                             enter_frac, exit_frac);
}

namespace {

// Mean of f under the stationary state: (1/L) integral over x of the
// Gaussian-velocity average, by tensor Gauss-Legendre panels.
double stationary_mean(const TestFunction& f, double xi, double sigma,
                       double L, int px, int pu) {
    const double sd = sigma / std::sqrt(2.0);
    const double ulo = xi - 8.5 * sd;
    const double uhi = xi + 8.5 * sd;
    const double norm = 1.0 / (sd * std::sqrt(2.0 * M_PI));
    double total = 0.0;
    for (int i = 0; i < px; ++i) {
        const double xa = L * i / px;
        const double xb = L * (i + 1) / px;
        auto inner = [&](double x) {
            double acc = 0.0;
            for (int j = 0; j < pu; ++j) {
                const double ua = ulo + (uhi - ulo) * j / pu;
                const double ub = ulo + (uhi - ulo) * (j + 1) / pu;
                acc += detail::gl16(
                    [&](double u) {
                        const double d = (u - xi) / sd;
                        return f(x, u) * norm * std::exp(-0.5 * d * d);
                    },
                    ua, ub);
            }
            return acc;
        };
        total += detail::gl16(inner, xa, xb);
    }
    return total / L;
}

double stationary_mean_checked(const TestFunction& f, double xi, double sigma,
                               double L) {
    const double coarse = stationary_mean(f, xi, sigma, L, 16, 24);
    const double fine = stationary_mean(f, xi, sigma, L, 32, 48);
    if (std::fabs(fine - coarse) > 1e-8 * std::max(1.0, std::fabs(fine)))
        throw std::runtime_error(
            "fluctuation test: quadrature did not converge for test function");
    return fine;
}

}  // namespace

FluctuationResult fluctuation_covariance_test(double xi, double sigma,
                                              double L, const TestFunction& f1,
                                              const TestFunction& f2, long n,
                                              long replicates,
                                              std::uint64_t seed) {
    if (!(sigma > 0.0)) throw std::invalid_argument("fluctuation: sigma > 0");
    if (n < 1 || replicates < 2)
        throw std::invalid_argument("fluctuation: need n >= 1, replicates >= 2");

    const double e1 = stationary_mean_checked(f1, xi, sigma, L);
    const double e2 = stationary_mean_checked(f2, xi, sigma, L);
    const double e12 = stationary_mean_checked(
        [&](double x, double u) { return f1(x, u) * f2(x, u); }, xi, sigma, L);
    const double predicted = e12 - e1 * e2;

    const double sd = sigma / std::sqrt(2.0);
    const double sqrtn = std::sqrt(static_cast<double>(n));
    double s1 = 0.0, s2 = 0.0, s11 = 0.0, s22 = 0.0, s12 = 0.0;
    std::vector<double> xs(n), us(n);
    for (long r = 0; r < replicates; ++r) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
        for (long i = 0; i < n; ++i) xs[i] = L * rng.uniform();
        for (long i = 0; i < n; ++i) us[i] = xi + sd * rng.normal();
        double a1 = 0.0, a2 = 0.0;
        for (long i = 0; i < n; ++i) {
            a1 += f1(xs[i], us[i]);
            a2 += f2(xs[i], us[i]);
        }
        const double y1 = sqrtn * (a1 / n - e1);
        const double y2 = sqrtn * (a2 / n - e2);
        s1 += y1;
        s2 += y2;
        s11 += y1 * y1;
        s22 += y2 * y2;
        s12 += y1 * y2;
    }
    const double R = static_cast<double>(replicates);
    const double m1 = s1 / R;
    const double m2 = s2 / R;
    const double v1 = (s11 - R * m1 * m1) / (R - 1.0);
    const double v2 = (s22 - R * m2 * m2) / (R - 1.0);
    const double cov = (s12 - R * m1 * m2) / (R - 1.0);

    FluctuationResult res;
    res.empirical = cov;
    res.predicted = predicted;
    // Standard error of a sample covariance of jointly Gaussian pairs. A
    // deviation below quadrature precision counts as zero: for degenerate
    // (deterministic) test functions the spread collapses to rounding noise
    // and the raw ratio would amplify the quadrature error instead of
    // measuring a statistical deviation.
    const double se = std::sqrt(std::max(0.0, v1 * v2 + cov * cov) / (R - 1.0));
    const double quad_floor =
        1e-8 * (1.0 + std::fabs(e1 * e2) + std::fabs(e12));
    if (std::fabs(cov - predicted) <= quad_floor || se <= quad_floor)
        res.z = 0.0;
    else
        res.z = (cov - predicted) / se;
    return res;
}

}  // namespace czirok
