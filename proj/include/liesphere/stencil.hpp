#pragma once
#include <span>
#include <vector>

namespace liesphere {

/// Fornberg weights: coefficients w_j with f^(m)(x0) ~ sum_j w_j f(x_j)
/// for arbitrary node locations x_j. Exact for polynomials of degree
/// < x.size(), so n nodes give accuracy order >= n - m (plus one for
/// symmetric stencils).
inline std::vector<double> fd_weights(double x0, std::span<const double> x, int m) {
    const int n = static_cast<int>(x.size());
    std::vector<double> d((m + 1) * n, 0.0);
    auto D = [&](int k, int j) -> double& { return d[k * n + j]; };
    double c1 = 1.0;
    double c4 = x[0] - x0;
    D(0, 0) = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    D(k, i) = c1 * (k * D(k - 1, i - 1) - c5 * D(k, i - 1)) / c2;
                D(0, i) = -c1 * c5 * D(0, i - 1) / c2;
            }
            for (int k = mn; k >= 1; --k)
                D(k, j) = (c4 * D(k, j) - k * D(k - 1, j)) / c3;
            D(0, j) = c4 * D(0, j) / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (int j = 0; j < n; ++j) w[j] = D(m, j);
    return w;
}

/// Node offsets (in grid units) for an order-4 interior stencil of
/// derivative order m, centered at 0.
inline std::vector<int> centered_offsets(int m) {
    const int half = (m <= 2) ? 2 : 3;
    std::vector<int> off;
    for (int i = -half; i <= half; ++i) off.push_back(i);
    return off;
}

} // namespace liesphere
