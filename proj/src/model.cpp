#include "czirok/model.hpp"

#include <algorithm>
#include <cmath>

namespace czirok {

double GSpec::operator()(double u) const {
    switch (variant) {
        case GVariant::cubic:
            return (h + 1.0) / 5.0 * u - h / 125.0 * u * u * u;
        case GVariant::tanh_gain:
            return a * std::tanh(u);
        case GVariant::odd_polynomial: {
            // Horner in u^2, then one extra factor of u keeps G odd.
            double u2 = u * u;
            double acc = 0.0;
            for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it)
                acc = acc * u2 + *it;
            return acc * u;
        }
    }
    return 0.0;
}

double GSpec::prime(double u) const {
    switch (variant) {
        case GVariant::cubic:
            return (h + 1.0) / 5.0 - 3.0 * h / 125.0 * u * u;
        case GVariant::tanh_gain: {
            double c = std::cosh(u);
            return a / (c * c);
        }
        case GVariant::odd_polynomial: {
            double u2 = u * u;
            double acc = 0.0;
            double p = 1.0;
            for (std::size_t m = 0; m < coeffs.size(); ++m) {
                acc += coeffs[m] * static_cast<double>(2 * m + 1) * p;
                p *= u2;
            }
            return acc;
        }
    }
    return 0.0;
}

void GSpec::validate() const {
    if (variant == GVariant::odd_polynomial && coeffs.empty())
        throw std::invalid_argument("odd-polynomial G needs coefficients");
    if (!std::isfinite(h) || !std::isfinite(a))
        throw std::invalid_argument("G parameters must be finite");
    for (double c : coeffs)
        if (!std::isfinite(c))
            throw std::invalid_argument("G coefficients must be finite");
}

double KernelSpec::amplitude() const {
    return variant == KernelVariant::top_hat ? L / (2.0 * r) : 1.0;
}

double KernelSpec::phi(double dist) const {
    if (variant == KernelVariant::uniform) return 1.0;
    return dist <= r ? amplitude() : 0.0;
}

double KernelSpec::fourier_coefficient(int k) const {
    if (k == 0) return 1.0;  // normalization
    if (variant == KernelVariant::uniform) return 0.0;
    double z = 2.0 * M_PI * k * r / L;
    return std::sin(z) / z;
}

void KernelSpec::validate() const {
    if (!(L > 0.0)) throw std::invalid_argument("kernel: L must be > 0");
    if (variant == KernelVariant::top_hat && !(r > 0.0 && r <= L / 2.0))
        throw std::invalid_argument("kernel: need 0 < r <= L/2");
}

void ModelParams::validate() const {
    if (n < 1) throw std::invalid_argument("model: n must be >= 1");
    if (!(l > 0.0)) throw std::invalid_argument("model: l must be > 0");
    if (!(sigma >= 0.0)) throw std::invalid_argument("model: sigma must be >= 0");
    if (!(dt > 0.0)) throw std::invalid_argument("model: dt must be > 0");
    if (steps < 0) throw std::invalid_argument("model: steps must be >= 0");
    g.validate();
    kernel.validate();
    if (kernel.L != l)
        throw std::invalid_argument("model: kernel torus length differs from l");
}

StationaryState::StationaryState(double xi_, double sigma_, double L_)
    : xi(xi_), sigma(sigma_), L(L_) {
    if (!(sigma > 0.0))
        throw std::invalid_argument("stationary state needs sigma > 0");
    if (!(L > 0.0)) throw std::invalid_argument("stationary state needs L > 0");
}

double StationaryState::density(double /*x*/, double u) const {
    double d = u - xi;
    return std::exp(-d * d / (sigma * sigma)) /
           (L * std::sqrt(M_PI) * sigma);
}

double StationaryState::velocity_marginal(double u) const {
    return L * density(0.0, u);
}

namespace {

double bisect_root(const GSpec& g, double a, double b, double tol) {
    auto f = [&](double v) { return v - g(v); };
    double fa = f(a);
    for (int it = 0; it < 200 && b - a > tol; ++it) {
        double m = 0.5 * (a + b);
        double fm = f(m);
        if ((fa <= 0.0) == (fm <= 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

std::vector<double> compatibility_roots(const GSpec& g, double lo, double hi,
                                        double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");
    if (!(lo < hi)) throw std::invalid_argument("empty bracket");
    auto f = [&](double v) { return v - g(v); };

    // G odd means 0 is always a root; scan the positive half and mirror so
    // the output is exactly sign-symmetric.
    std::vector<double> pos;
    const double step = 1e-2;
    double top = std::max(hi, -lo);
    double prev = step;  // skip the root at 0, rediscovered below
    double fprev = f(prev);
    for (double v = prev + step; v <= top + 0.5 * step; v += step) {
        double fv = f(v);
        if ((fprev <= 0.0) != (fv <= 0.0)) {
            double rt = bisect_root(g, v - step, v, tol);
            if (std::fabs(rt - g(rt)) <= tol) pos.push_back(rt);
        }
        fprev = fv;
    }
    // Sign change across 0 is the root at 0 itself; also catch a root inside
    // (0, step] that the scan skipped.
    if (f(step) * f(step / 2) < 0.0 || std::fabs(f(step / 2)) <= tol) {
        double rt = bisect_root(g, step / 2, step, tol);
        if (std::fabs(rt - g(rt)) <= tol && (pos.empty() || rt < pos.front()))
            pos.insert(pos.begin(), rt);
    }

    std::vector<double> roots;
    for (auto it = pos.rbegin(); it != pos.rend(); ++it)
        if (-*it >= lo && -*it <= hi) roots.push_back(-*it);
    if (lo <= 0.0 && hi >= 0.0) roots.push_back(0.0);
    for (double r : pos)
        if (r >= lo && r <= hi) roots.push_back(r);
    if (roots.empty())
        throw std::runtime_error("compatibility_roots: no root bracket inside interval");
    return roots;
}

double ordered_state_root(const GSpec& g) {
    auto roots = compatibility_roots(g, -10.0, 10.0);
    return roots.back();
}

}  // namespace czirok
