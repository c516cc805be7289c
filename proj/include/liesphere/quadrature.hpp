#pragma once
#include <cmath>
#include <functional>
#include <vector>

#include "liesphere/errors.hpp"

namespace liesphere {

/// Composite 1D rule on n+1 points over [a,b]; `periodic` switches to the
/// trapezoid rule on n cells (spectrally accurate for periodic integrands).
/// Non-periodic integration is composite Simpson and needs even n.
inline double integrate_1d(const std::function<double(double)>& f, double a, double b,
                           int n, bool periodic) {
    if (periodic) {
        const double h = (b - a) / n;
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += f(a + i * h);
        return s * h;
    }
    if (n % 2 != 0) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * ((i % 2) ? 4.0 : 2.0);
    return s * h / 3.0;
}

/// Tensor-product rule over a box; per-axis choice of Simpson vs periodic
/// trapezoid.
inline double integrate_2d(const std::function<double(double, double)>& f, double ax,
                           double bx, double ay, double by, int nx, int ny, bool px,
                           bool py) {
    auto outer = [&](double y) {
        return integrate_1d([&](double x) { return f(x, y); }, ax, bx, nx, px);
    };
    return integrate_1d(outer, ay, by, ny, py);
}

/// Cumulative antiderivative along a sampled line, zero at the first node
/// (composite trapezoid between nodes refined by Richardson from the samples
/// themselves is unnecessary here; Simpson-based pairs keep order 4).
inline std::vector<double> cumulative_integral(const std::vector<double>& f, double h) {
    const int n = static_cast<int>(f.size());
    std::vector<double> F(n, 0.0);
    for (int i = 1; i < n; ++i) {
        // 4th-order local increment: cubic through the nearest four samples.
        int base = std::clamp(i - 2, 0, n - 4);
        const double t0 = (i - 1) - base, t1 = i - base;
        // Integrate the Lagrange cubic on [t0, t1] in index units.
        double inc = 0.0;
        for (int k = 0; k < 4; ++k) {
            // antiderivative of the k-th Lagrange basis over [t0, t1]
            double c[4];
            // basis polynomial coefficients via expansion of prod_{m != k}(t - m)/(k - m)
            double denom = 1.0;
            double poly[4] = {1.0, 0.0, 0.0, 0.0}; // constant 1
            int deg = 0;
            for (int m = 0; m < 4; ++m) {
                if (m == k) continue;
                denom *= (k - m);
                for (int d = deg; d >= 0; --d) {
                    poly[d + 1] += poly[d];
                    poly[d] *= -m;
                }
                ++deg;
            }
            for (int d = 0; d <= 3; ++d) c[d] = poly[d] / denom;
            auto anti = [&](double t) {
                return c[0] * t + c[1] * t * t / 2 + c[2] * t * t * t / 3 +
                       c[3] * t * t * t * t / 4;
            };
            inc += f[base + k] * (anti(t1) - anti(t0));
        }
        F[i] = F[i - 1] + inc * h;
    }
    return F;
}

} // namespace liesphere
