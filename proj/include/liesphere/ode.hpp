#pragma once
#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "liesphere/errors.hpp"

namespace liesphere {

using OdeFn = std::function<void(double, const std::vector<double>&, std::vector<double>&)>;

/// Dormand-Prince 5(4) with PI step control. Integrates y' = f(t, y) from t0
/// to t1; `watch` (optional) can abort the run by returning false.
struct OdeResult {
    std::vector<double> y;
    int steps = 0;
};

inline OdeResult rk45(const OdeFn& f, double t0, double t1, std::vector<double> y,
                      double tol, double hmax = 0.0,
                      const std::function<bool(double, const std::vector<double>&)>& watch = {},
                      long max_steps = 1000000) {
    static const double c[7] = {0, 1. / 5, 3. / 10, 4. / 5, 8. / 9, 1., 1.};
    static const double a[7][6] = {
        {},
        {1. / 5},
        {3. / 40, 9. / 40},
        {44. / 45, -56. / 15, 32. / 9},
        {19372. / 6561, -25360. / 2187, 64448. / 6561, -212. / 729},
        {9017. / 3168, -355. / 33, 46732. / 5247, 49. / 176, -5103. / 18656},
        {35. / 384, 0., 500. / 1113, 125. / 192, -2187. / 6784, 11. / 84}};
    static const double e[7] = {71. / 57600, 0., -71. / 16695, 71. / 1920,
                                -17253. / 339200, 22. / 525, -1. / 40};

    const int n = static_cast<int>(y.size());
    const double dir = (t1 >= t0) ? 1.0 : -1.0;
    double t = t0;
    double h = dir * std::min(std::abs(t1 - t0), hmax > 0 ? hmax : std::abs(t1 - t0));
    if (h == 0.0) return {y, 0};
    std::vector<std::vector<double>> k(7, std::vector<double>(n));
    std::vector<double> ytmp(n), ynew(n);
    f(t, y, k[0]);
    OdeResult res;
    while (dir * (t1 - t) > 1e-300) {
        if (dir * (t + h - t1) > 0) h = t1 - t;
        for (int s = 1; s < 7; ++s) {
            for (int i = 0; i < n; ++i) {
                double acc = 0.0;
                for (int q = 0; q < s; ++q) acc += a[s][q] * k[q][i];
                ytmp[i] = y[i] + h * acc;
            }
            f(t + c[s] * h, ytmp, k[s]);
        }
        // k[6] is f at the 5th-order solution (FSAL); ytmp currently holds it.
        ynew = ytmp;
        double err = 0.0;
        for (int i = 0; i < n; ++i) {
            double ei = 0.0;
            for (int q = 0; q < 7; ++q) ei += e[q] * k[q][i];
            ei *= h;
            const double sc = tol * (1.0 + std::max(std::abs(y[i]), std::abs(ynew[i])));
            err = std::max(err, std::abs(ei) / sc);
        }
        if (err <= 1.0) {
            t += h;
            y = ynew;
            k[0] = k[6];
            if (watch && !watch(t, y)) return {y, res.steps};
            if (++res.steps > max_steps) throw StepFailure("rk45 step budget exhausted");
        }
        double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
        fac = std::clamp(fac, 0.2, 5.0);
        h *= fac;
        if (hmax > 0) h = dir * std::min(std::abs(h), hmax);
        if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(t)))
            throw StepFailure("rk45 step size underflow");
    }
    res.y = y;
    return res;
}

/// Fixed-step classical RK4 with stored nodes for later dense evaluation.
/// Quintic Hermite interpolation between nodes uses stored values, first
/// derivatives f, and second derivatives supplied by `fprime` (closed-form
/// for the ODEs this backs), so the interpolation error is O(h^6).
class DenseOde1 {
public:
    // Scalar 2nd-order autonomous ODE y'' = g(y, y') integrated as a system.
    DenseOde1(std::function<double(double, double)> g, double s0, double y0, double yp0,
              double h)
        : g_(std::move(g)), s0_(s0), h_(h) {
        ys_.push_back(y0);
        yps_.push_back(yp0);
    }

    /// Extend the tabulated range to cover [smin, smax].
    void extend(double smin, double smax,
                const std::function<bool(double, double)>& ok = {}) {
        while (s0_ + (static_cast<double>(ys_.size()) - 1 + lo_) * h_ < smax) step_forward(ok);
        while (s0_ + lo_ * h_ > smin) step_backward(ok);
    }

    double ymin() const { return *std::min_element(ys_.begin(), ys_.end()); }
    double ymax() const { return *std::max_element(ys_.begin(), ys_.end()); }

    /// Value and first `nder` derivatives of y at s (nder <= 1 from the
    /// table; higher derivatives are the caller's business via the ODE).
    void eval(double s, double& y, double& yp) const {
        const double u = (s - s0_) / h_ - lo_;
        int i = static_cast<int>(std::floor(u));
        i = std::clamp(i, 0, static_cast<int>(ys_.size()) - 2);
        const double t = u - i; // in [0,1]
        const double y0 = ys_[i], y1 = ys_[i + 1];
        const double d0 = yps_[i] * h_, d1 = yps_[i + 1] * h_;
        const double a0 = g_(ys_[i], yps_[i]) * h_ * h_;
        const double a1 = g_(ys_[i + 1], yps_[i + 1]) * h_ * h_;
        // Quintic Hermite basis on [0,1].
        const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
        const double H0 = 1 - 10 * t3 + 15 * t4 - 6 * t5;
        const double H1 = t - 6 * t3 + 8 * t4 - 3 * t5;
        const double H2 = 0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5;
        const double H3 = 0.5 * t3 - t4 + 0.5 * t5;
        const double H4 = -4 * t3 + 7 * t4 - 3 * t5;
        const double H5 = 10 * t3 - 15 * t4 + 6 * t5;
        y = H0 * y0 + H1 * d0 + H2 * a0 + H3 * a1 + H4 * d1 + H5 * y1;
        const double G0 = -30 * t2 + 60 * t3 - 30 * t4;
        const double G1 = 1 - 18 * t2 + 32 * t3 - 15 * t4;
        const double G2 = t - 4.5 * t2 + 6 * t3 - 2.5 * t4;
        const double G3 = 1.5 * t2 - 4 * t3 + 2.5 * t4;
        const double G4 = -12 * t2 + 28 * t3 - 15 * t4;
        const double G5 = 30 * t2 - 60 * t3 + 30 * t4;
        yp = (G0 * y0 + G1 * d0 + G2 * a0 + G3 * a1 + G4 * d1 + G5 * y1) / h_;
    }

private:
    void rk4(double y, double yp, double h, double& yo, double& ypo) const {
        auto f = [&](double a, double b, double& da, double& db) {
            da = b;
            db = g_(a, b);
        };
        double k1a, k1b, k2a, k2b, k3a, k3b, k4a, k4b;
        f(y, yp, k1a, k1b);
        f(y + 0.5 * h * k1a, yp + 0.5 * h * k1b, k2a, k2b);
        f(y + 0.5 * h * k2a, yp + 0.5 * h * k2b, k3a, k3b);
        f(y + h * k3a, yp + h * k3b, k4a, k4b);
        yo = y + h / 6 * (k1a + 2 * k2a + 2 * k3a + k4a);
        ypo = yp + h / 6 * (k1b + 2 * k2b + 2 * k3b + k4b);
    }
    void step_forward(const std::function<bool(double, double)>& ok) {
        double y, yp;
        rk4(ys_.back(), yps_.back(), h_, y, yp);
        if (ok && !ok(y, yp)) throw BlowUp("dense ode left admissible range");
        ys_.push_back(y);
        yps_.push_back(yp);
    }
    void step_backward(const std::function<bool(double, double)>& ok) {
        double y, yp;
        rk4(ys_.front(), yps_.front(), -h_, y, yp);
        if (ok && !ok(y, yp)) throw BlowUp("dense ode left admissible range");
        ys_.insert(ys_.begin(), y);
        yps_.insert(yps_.begin(), yp);
        lo_ -= 1;
    }

    std::function<double(double, double)> g_;
    double s0_, h_;
    double lo_ = 0; // index offset of ys_[0] relative to s0_
    std::vector<double> ys_, yps_;
};

} // namespace liesphere
