#pragma once
#include <cassert>
#include <cmath>
#include <functional>
#include <vector>

#include "liesphere/errors.hpp"
#include "liesphere/stencil.hpp"

namespace liesphere {

/// Rectangular sampling of a 2D parameter box. For periodic axes the last
/// sample is the one before the period closes (n cells of width h cover the
/// whole period).
struct Grid2 {
    double x0 = 0.0, y0 = 0.0;
    double hx = 0.0, hy = 0.0;
    int nx = 0, ny = 0;
    bool periodic_x = false, periodic_y = false;

    static Grid2 over(double ax, double bx, double ay, double by, int nx, int ny,
                      bool px = false, bool py = false) {
        Grid2 g;
        g.x0 = ax;
        g.y0 = ay;
        g.nx = nx;
        g.ny = ny;
        g.periodic_x = px;
        g.periodic_y = py;
        g.hx = (bx - ax) / (px ? nx : nx - 1);
        g.hy = (by - ay) / (py ? ny : ny - 1);
        return g;
    }
    double x(int i) const { return x0 + i * hx; }
    double y(int j) const { return y0 + j * hy; }
    int index(int i, int j) const { return j * nx + i; }
    int size() const { return nx * ny; }
};

/// Scalar samples on a Grid2 with finite-difference derivative access of
/// accuracy order 4 (one-sided stencils of the same order at non-periodic
/// boundaries). Derivative orders up to 4 per axis are supported.
class GridField2 {
public:
    GridField2() = default;
    GridField2(Grid2 g, std::vector<double> data) : grid_(g), data_(std::move(data)) {
        assert(static_cast<int>(data_.size()) == grid_.size());
    }
    static GridField2 sample(const Grid2& g, const std::function<double(double, double)>& f) {
        std::vector<double> d(g.size());
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) d[g.index(i, j)] = f(g.x(i), g.y(j));
        return GridField2(g, std::move(d));
    }

    const Grid2& grid() const { return grid_; }
    double at(int i, int j) const { return data_[grid_.index(i, j)]; }
    double& at(int i, int j) { return data_[grid_.index(i, j)]; }
    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    /// d^a/dx^a d^b/dy^b at node (i, j).
    double deriv_at(int i, int j, int a, int b) const {
        if (a > 4 || b > 4)
            throw InsufficientDerivativeOrder("grid fields support order <= 4");
        if (a == 0 && b == 0) return at(i, j);
        if (a > 0 && b == 0) return axis_deriv<0>(i, j, a);
        if (a == 0 && b > 0) return axis_deriv<1>(i, j, b);
        // Mixed: differentiate rows in x first, then the column in y.
        auto [off, w] = stencil_for<1>(j, b);
        double s = 0.0;
        for (size_t t = 0; t < off.size(); ++t)
            s += w[t] * axis_deriv<0>(i, wrap<1>(j + off[t]), a);
        return s;
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : data_) m = std::max(m, std::abs(v));
        return m;
    }

private:
    template <int Axis>
    int wrap(int i) const {
        const int n = (Axis == 0) ? grid_.nx : grid_.ny;
        const bool per = (Axis == 0) ? grid_.periodic_x : grid_.periodic_y;
        if (per) {
            i %= n;
            if (i < 0) i += n;
        }
        return i;
    }

    /// Offsets and weights for an order-4 stencil of derivative order m at
    /// 1D index i along the axis.
    template <int Axis>
    std::pair<std::vector<int>, std::vector<double>> stencil_for(int i, int m) const {
        const int n = (Axis == 0) ? grid_.nx : grid_.ny;
        const double h = (Axis == 0) ? grid_.hx : grid_.hy;
        const bool per = (Axis == 0) ? grid_.periodic_x : grid_.periodic_y;
        std::vector<int> off = centered_offsets(m);
        if (!per) {
            const int half = -off.front();
            const int width = m + 5; // one extra node keeps one-sided stencils at order 4
            if (i - half < 0) {
                off.clear();
                for (int t = 0; t < width; ++t) off.push_back(t - i);
            } else if (i + half >= n) {
                off.clear();
                for (int t = 0; t < width; ++t) off.push_back(n - width + t - i);
            }
        }
        std::vector<double> nodes(off.size());
        for (size_t t = 0; t < off.size(); ++t) nodes[t] = off[t] * h;
        return {off, fd_weights(0.0, nodes, m)};
    }

    template <int Axis>
    double axis_deriv(int i, int j, int m) const {
        const int idx1d = (Axis == 0) ? i : j;
        auto [off, w] = stencil_for<Axis>(idx1d, m);
        double s = 0.0;
        for (size_t t = 0; t < off.size(); ++t) {
            const int ii = (Axis == 0) ? wrap<0>(i + off[t]) : i;
            const int jj = (Axis == 0) ? j : wrap<1>(j + off[t]);
            s += w[t] * at(ii, jj);
        }
        return s;
    }

    Grid2 grid_;
    std::vector<double> data_;
};

} // namespace liesphere
