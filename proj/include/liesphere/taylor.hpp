#pragma once
#include <array>
#include <cmath>
#include <cstdint>
#include "liesphere/errors.hpp"

namespace liesphere {

/// Truncated multivariate Taylor arithmetic (forward-mode differentiation to
/// arbitrary mixed order). A Taylor<Dim,Ord> carries the coefficients
/// c_alpha of sum_alpha c_alpha dx^alpha over all multi-indices alpha with
/// alpha_i <= Ord. Arithmetic truncates at the same index box, so the partial
/// derivative d^alpha f = alpha! * c_alpha is exact for every retained alpha.
///
/// Catalog surfaces evaluate their parametrizations in this type; everything
/// derived from them (metric, curvature, invariant forms) then has closed-form
/// derivative access without any finite differencing.
template <int Dim, int Ord>
class Taylor {
public:
    static constexpr int kPerVar = Ord + 1;
    static constexpr int kSize = []() {
        int s = 1;
        for (int d = 0; d < Dim; ++d) s *= kPerVar;
        return s;
    }();
    // Highest power of a zero-constant-term series that can still contribute.
    static constexpr int kMaxComposeOrder = Dim * Ord;

    Taylor() { c_.fill(0.0); }
    /* implicit */ Taylor(double v) {
        c_.fill(0.0);
        c_[0] = v;
    }

    /// Independent variable number `axis` with base value v.
    static Taylor variable(double v, int axis) {
        Taylor t;
        t.c_[0] = v;
        t.c_[stride(axis)] = 1.0;
        return t;
    }

    double value() const { return c_[0]; }

    /// d^a1 d^a2 ... f at the expansion point.
    template <typename... Ints>
    double derivative(Ints... orders) const {
        static_assert(sizeof...(orders) == Dim);
        const std::array<int, Dim> a{orders...};
        int idx = 0;
        double fact = 1.0;
        for (int d = 0; d < Dim; ++d) {
            if (a[d] < 0 || a[d] > Ord)
                throw InsufficientDerivativeOrder("taylor order exceeded");
            idx += a[d] * stride(d);
            for (int k = 2; k <= a[d]; ++k) fact *= k;
        }
        return c_[idx] * fact;
    }

    /// Coefficient access by flat index (used by the convolution kernels).
    double& raw(int i) { return c_[i]; }
    double raw(int i) const { return c_[i]; }

    /// The Taylor series of the partial derivative along `axis`. The result
    /// loses the top order in that axis; querying beyond it is the caller's
    /// responsibility (chart pipelines stay well inside the budget).
    Taylor shift(int axis) const {
        Taylor r;
        const int st = stride(axis);
        for (int i = 0; i < kSize; ++i) {
            const int p = (i / st) % kPerVar;
            if (p == 0) continue;
            r.c_[i - st] += c_[i] * p;
        }
        return r;
    }

    Taylor operator-() const {
        Taylor r;
        for (int i = 0; i < kSize; ++i) r.c_[i] = -c_[i];
        return r;
    }
    Taylor& operator+=(const Taylor& o) {
        for (int i = 0; i < kSize; ++i) c_[i] += o.c_[i];
        return *this;
    }
    Taylor& operator-=(const Taylor& o) {
        for (int i = 0; i < kSize; ++i) c_[i] -= o.c_[i];
        return *this;
    }
    Taylor& operator*=(double s) {
        for (int i = 0; i < kSize; ++i) c_[i] *= s;
        return *this;
    }

    friend Taylor operator+(Taylor a, const Taylor& b) { return a += b; }
    friend Taylor operator-(Taylor a, const Taylor& b) { return a -= b; }
    friend Taylor operator*(const Taylor& a, double s) {
        Taylor r = a;
        return r *= s;
    }
    friend Taylor operator*(double s, const Taylor& a) { return a * s; }

    friend Taylor operator*(const Taylor& a, const Taylor& b) {
        Taylor r;
        // Truncated convolution over the index box.
        for (int i = 0; i < kSize; ++i) {
            const double ai = a.c_[i];
            if (ai == 0.0) continue;
            const auto mi = decode(i);
            for (int j = 0; j < kSize; ++j) {
                const double bj = b.c_[j];
                if (bj == 0.0) continue;
                const auto mj = decode(j);
                int idx = 0;
                bool ok = true;
                for (int d = 0; d < Dim; ++d) {
                    const int s = mi[d] + mj[d];
                    if (s > Ord) {
                        ok = false;
                        break;
                    }
                    idx += s * stride(d);
                }
                if (ok) r.c_[idx] += ai * bj;
            }
        }
        return r;
    }

    friend Taylor operator/(const Taylor& a, const Taylor& b) {
        return a * recip(b);
    }
    friend Taylor operator/(double s, const Taylor& b) {
        return recip(b) * s;
    }
    friend Taylor operator/(const Taylor& a, double s) { return a * (1.0 / s); }

    /// f(g) where `uni[k]` = f^(k)(g.value())/k!, k = 0..kMaxComposeOrder.
    static Taylor compose(const Taylor& g,
                          const std::array<double, kMaxComposeOrder + 1>& uni) {
        Taylor ghat = g;
        ghat.c_[0] = 0.0;
        Taylor r(uni[kMaxComposeOrder]);
        for (int k = kMaxComposeOrder - 1; k >= 0; --k) {
            r = r * ghat;
            r.c_[0] += uni[k];
        }
        return r;
    }

    friend Taylor recip(const Taylor& x) {
        const double x0 = x.value();
        if (x0 == 0.0) throw ZeroDivision("taylor reciprocal at zero");
        std::array<double, kMaxComposeOrder + 1> u;
        double p = 1.0 / x0;
        for (int k = 0; k <= kMaxComposeOrder; ++k) {
            u[k] = p;
            p *= -1.0 / x0;
        }
        return compose(x, u);
    }

    friend Taylor exp(const Taylor& x) {
        std::array<double, kMaxComposeOrder + 1> u;
        double f = std::exp(x.value());
        for (int k = 0; k <= kMaxComposeOrder; ++k) {
            u[k] = f;
            f /= (k + 1);
        }
        return compose(x, u);
    }

    friend Taylor log(const Taylor& x) {
        const double x0 = x.value();
        if (x0 <= 0.0) throw NonPositiveDensity("taylor log of non-positive value");
        std::array<double, kMaxComposeOrder + 1> u;
        u[0] = std::log(x0);
        double p = 1.0 / x0;
        for (int k = 1; k <= kMaxComposeOrder; ++k) {
            u[k] = p / k * ((k % 2) ? 1.0 : -1.0);
            p /= x0;
        }
        return compose(x, u);
    }

    friend Taylor pow(const Taylor& x, double e) {
        const double x0 = x.value();
        if (x0 <= 0.0) throw NegativeRadicand("taylor pow of non-positive base");
        std::array<double, kMaxComposeOrder + 1> u;
        double coef = std::pow(x0, e);
        for (int k = 0; k <= kMaxComposeOrder; ++k) {
            u[k] = coef;
            coef *= (e - k) / (k + 1) / x0;
        }
        return compose(x, u);
    }

    friend Taylor sqrt(const Taylor& x) { return pow(x, 0.5); }

    friend Taylor sin(const Taylor& x) {
        std::array<double, kMaxComposeOrder + 1> u;
        const double s = std::sin(x.value()), c = std::cos(x.value());
        const double cyc[4] = {s, c, -s, -c};
        double fact = 1.0;
        for (int k = 0; k <= kMaxComposeOrder; ++k) {
            if (k > 0) fact *= k;
            u[k] = cyc[k % 4] / fact;
        }
        return compose(x, u);
    }

    friend Taylor cos(const Taylor& x) {
        std::array<double, kMaxComposeOrder + 1> u;
        const double s = std::sin(x.value()), c = std::cos(x.value());
        const double cyc[4] = {c, -s, -c, s};
        double fact = 1.0;
        for (int k = 0; k <= kMaxComposeOrder; ++k) {
            if (k > 0) fact *= k;
            u[k] = cyc[k % 4] / fact;
        }
        return compose(x, u);
    }

    friend Taylor sinh(const Taylor& x) {
        std::array<double, kMaxComposeOrder + 1> u;
        const double sh = std::sinh(x.value()), ch = std::cosh(x.value());
        double fact = 1.0;
        for (int k = 0; k <= kMaxComposeOrder; ++k) {
            if (k > 0) fact *= k;
            u[k] = ((k % 2) ? ch : sh) / fact;
        }
        return compose(x, u);
    }

    friend Taylor cosh(const Taylor& x) {
        std::array<double, kMaxComposeOrder + 1> u;
        const double sh = std::sinh(x.value()), ch = std::cosh(x.value());
        double fact = 1.0;
        for (int k = 0; k <= kMaxComposeOrder; ++k) {
            if (k > 0) fact *= k;
            u[k] = ((k % 2) ? sh : ch) / fact;
        }
        return compose(x, u);
    }

    friend Taylor tanh(const Taylor& x) { return sinh(x) / cosh(x); }

    /// |x| assuming x does not vanish at the expansion point.
    friend Taylor absval(const Taylor& x) {
        if (x.value() == 0.0) throw ZeroDivision("absval at sign change");
        return x.value() > 0.0 ? x : -x;
    }

private:
    static constexpr int stride(int axis) {
        int s = 1;
        for (int d = 0; d < axis; ++d) s *= kPerVar;
        return s;
    }
    static std::array<int, Dim> decode(int idx) {
        std::array<int, Dim> m;
        for (int d = 0; d < Dim; ++d) {
            m[d] = idx % kPerVar;
            idx /= kPerVar;
        }
        return m;
    }

    std::array<double, kSize> c_;
};

using T2 = Taylor<2, 4>; // surface pipelines: 2 parameters, mixed order <= 4
using T3 = Taylor<3, 3>; // hypersurface pipelines: 3 parameters, order <= 3

template <typename T, std::size_t N>
using Vec = std::array<T, N>;

template <typename T, std::size_t N>
Vec<T, N> operator+(const Vec<T, N>& a, const Vec<T, N>& b) {
    Vec<T, N> r;
    for (std::size_t i = 0; i < N; ++i) r[i] = a[i] + b[i];
    return r;
}
template <typename T, std::size_t N>
Vec<T, N> operator-(const Vec<T, N>& a, const Vec<T, N>& b) {
    Vec<T, N> r;
    for (std::size_t i = 0; i < N; ++i) r[i] = a[i] - b[i];
    return r;
}
template <typename T, std::size_t N, typename S>
Vec<T, N> operator*(const Vec<T, N>& a, const S& s) {
    Vec<T, N> r;
    for (std::size_t i = 0; i < N; ++i) r[i] = a[i] * s;
    return r;
}
template <typename T, std::size_t N>
T dot(const Vec<T, N>& a, const Vec<T, N>& b) {
    T r = a[0] * b[0];
    for (std::size_t i = 1; i < N; ++i) r = r + a[i] * b[i];
    return r;
}
template <typename T>
Vec<T, 3> cross(const Vec<T, 3>& a, const Vec<T, 3>& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0]};
}

} // namespace liesphere
