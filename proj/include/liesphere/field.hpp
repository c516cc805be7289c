#pragma once
#include <functional>
#include <memory>
#include <utility>

#include "liesphere/grid.hpp"
#include "liesphere/taylor.hpp"

namespace liesphere {

/// A scalar function on a 2D parameter domain. Two representations:
///  - closed form: a jet evaluator returning the full Taylor expansion at a
///    point (exact derivatives),
///  - grid: samples with finite-difference derivatives at the nodes.
/// Producers choose; consumers query values and derivatives without caring.
class Field2 {
public:
    using JetFn = std::function<T2(double, double)>;

    Field2() = default;
    static Field2 closed(JetFn f) {
        Field2 r;
        r.jet_ = std::move(f);
        return r;
    }
    static Field2 constant(double v) {
        return closed([v](double, double) { return T2(v); });
    }
    static Field2 on_grid(GridField2 g) {
        Field2 r;
        r.grid_ = std::make_shared<GridField2>(std::move(g));
        return r;
    }

    bool is_grid() const { return grid_ != nullptr; }
    bool valid() const { return grid_ || jet_; }
    const GridField2& grid() const { return *grid_; }

    T2 jet(double x, double y) const { return jet_(x, y); }

    double value(double x, double y) const {
        if (grid_) return grid_->at(nearest_i(x), nearest_j(y));
        return jet_(x, y).value();
    }
    /// Derivative d^a_x d^b_y; grid fields answer at the nearest node.
    double deriv(double x, double y, int a, int b) const {
        if (grid_) return grid_->deriv_at(nearest_i(x), nearest_j(y), a, b);
        return jet_(x, y).derivative(a, b);
    }

    GridField2 sampled(const Grid2& g) const {
        if (grid_) return *grid_;
        return GridField2::sample(g, [this](double x, double y) { return value(x, y); });
    }

    /// Full jet at (x, y): exact for closed-form fields; grid fields get a
    /// finite-difference jet at the nearest node with every mixed order up to
    /// total order 4 filled in.
    T2 jet_at(double x, double y) const {
        if (!grid_) return jet_(x, y);
        const auto& g = *grid_;
        const int i = nearest_i(x), j = nearest_j(y);
        T2 t(g.at(i, j));
        for (int a = 0; a <= 4; ++a)
            for (int b = 0; b + a <= 4; ++b) {
                if (a + b == 0) continue;
                double fact = 1.0;
                for (int q = 2; q <= a; ++q) fact *= q;
                for (int q = 2; q <= b; ++q) fact *= q;
                t.raw(a + 5 * b) = g.deriv_at(i, j, a, b) / fact;
            }
        return t;
    }

private:
    int nearest_i(double x) const {
        const auto& g = grid_->grid();
        int i = static_cast<int>(std::lround((x - g.x0) / g.hx));
        if (g.periodic_x) {
            i %= g.nx;
            if (i < 0) i += g.nx;
        }
        return std::clamp(i, 0, g.nx - 1);
    }
    int nearest_j(double y) const {
        const auto& g = grid_->grid();
        int j = static_cast<int>(std::lround((y - g.y0) / g.hy));
        if (g.periodic_y) {
            j %= g.ny;
            if (j < 0) j += g.ny;
        }
        return std::clamp(j, 0, g.ny - 1);
    }

    JetFn jet_;
    std::shared_ptr<GridField2> grid_;
};

} // namespace liesphere
