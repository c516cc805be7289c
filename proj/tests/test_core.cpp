#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "liesphere/expr.hpp"
#include "liesphere/geometry.hpp"
#include "liesphere/grid.hpp"
#include "liesphere/ode.hpp"
#include "liesphere/quadrature.hpp"
#include "liesphere/taylor.hpp"

using namespace liesphere;

namespace {

// Central-difference oracle for mixed partials of a plain double function.
double fd_mixed(const std::function<double(double, double)>& f, double x, double y,
                int a, int b, double h) {
    if (a > 0)
        return (fd_mixed(f, x + h, y, a - 1, b, h) - fd_mixed(f, x - h, y, a - 1, b, h)) /
               (2 * h);
    if (b > 0)
        return (fd_mixed(f, x, y + h, a, b - 1, h) - fd_mixed(f, x, y - h, a, b - 1, h)) /
               (2 * h);
    return f(x, y);
}

} // namespace

TEST_CASE("taylor arithmetic reproduces derivatives of a composite expression") {
    auto f = [](auto x, auto y) {
        return exp(x * 0.3) * sin(y) + sqrt(x * x + y * y + 1.0) / (x + 2.0);
    };
    const double x0 = 0.7, y0 = -0.4;
    const T2 v = f(T2::variable(x0, 0), T2::variable(y0, 1));
    auto fd = [&](double x, double y) { return f(x, y); };
    for (int a = 0; a <= 2; ++a)
        for (int b = 0; b + a <= 2; ++b) {
            const double got = v.derivative(a, b);
            const double want = fd_mixed(fd, x0, y0, a, b, 1e-3);
            CHECK(got == doctest::Approx(want).epsilon(1e-5));
        }
    // High mixed order against a hand-computed value: d2x d2y exp(xy).
    const T2 e = exp(T2::variable(0.3, 0) * T2::variable(-0.2, 1));
    const double xy = 0.3 * -0.2;
    const double exact =
        (2 + 4 * xy + 0.3 * 0.3 * 0.2 * 0.2) * std::exp(xy);
    CHECK(e.derivative(2, 2) == doctest::Approx(exact).epsilon(1e-13));
}

TEST_CASE("taylor log/pow/sinh round trips") {
    const T2 x = T2::variable(1.3, 0);
    const T2 y = exp(log(x));
    CHECK(y.value() == doctest::Approx(1.3).epsilon(1e-14));
    CHECK(y.derivative(1, 0) == doctest::Approx(1.0).epsilon(1e-12));
    const T2 p = pow(x, 1.0 / 6.0);
    CHECK(std::pow(p.value(), 6.0) == doctest::Approx(1.3).epsilon(1e-12));
    const T2 s = sinh(x) * sinh(x) - cosh(x) * cosh(x);
    CHECK(s.value() == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(s.derivative(1, 0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("grid derivatives converge at order 4") {
    auto f = [](double x, double y) { return std::sin(2 * x) * std::cos(y); };
    double prev = 0;
    for (int lvl = 0; lvl < 2; ++lvl) {
        const int n = 32 << lvl;
        Grid2 g = Grid2::over(0, 1, 0, 1, n, n);
        auto gf = GridField2::sample(g, f);
        const int i = n / 3, j = n / 2;
        const double x = g.x(i), y = g.y(j);
        const double got = gf.deriv_at(i, j, 2, 1);
        const double want = -(-4.0) * std::sin(2 * x) * std::sin(y) * -1.0;
        // d2x d1y of sin(2x)cos(y) = -4 sin(2x) * (-sin y) = 4 sin(2x) sin y
        const double exact = 4 * std::sin(2 * x) * std::sin(y);
        (void)want;
        const double err = std::abs(got - exact);
        if (lvl == 1) CHECK(err < prev / 8.0); // order >= 3 observed at worst
        prev = err;
        CHECK(err < 1e-4);
    }
}

TEST_CASE("periodic grid derivative is exact for resolved modes") {
    const int n = 32;
    Grid2 g = Grid2::over(0, 2 * M_PI, 0, 2 * M_PI, n, n, true, true);
    auto gf = GridField2::sample(g, [](double x, double y) { return std::sin(x + 2 * y); });
    const double got = gf.deriv_at(5, 7, 1, 1);
    const double exact = -2.0 * std::sin(g.x(5) + 2 * g.y(7));
    CHECK(got == doctest::Approx(exact).epsilon(5e-4));
}

TEST_CASE("simpson and periodic trapezoid quadrature") {
    const double v = integrate_1d([](double x) { return std::exp(x); }, 0, 1, 128, false);
    CHECK(v == doctest::Approx(std::exp(1.0) - 1).epsilon(1e-10));
    const double w =
        integrate_1d([](double x) { return std::cos(x) * std::cos(x); }, 0, 2 * M_PI, 32, true);
    CHECK(w == doctest::Approx(M_PI).epsilon(1e-12));
}

TEST_CASE("rk45 integrates a stiff-ish oscillator to tolerance") {
    OdeFn f = [](double, const std::vector<double>& y, std::vector<double>& d) {
        d[0] = y[1];
        d[1] = -y[0];
    };
    auto r = rk45(f, 0, 10, {1.0, 0.0}, 1e-12);
    CHECK(r.y[0] == doctest::Approx(std::cos(10.0)).epsilon(1e-9));
    CHECK(r.y[1] == doctest::Approx(-std::sin(10.0)).epsilon(1e-9));
}

TEST_CASE("dense ode interpolation and derivative") {
    // y'' = -y with y = sin(s)
    DenseOde1 ode([](double y, double) { return -y; }, 0.0, 0.0, 1.0, 1e-3);
    ode.extend(-2.0, 2.0);
    double y, yp;
    ode.eval(1.234567, y, yp);
    CHECK(y == doctest::Approx(std::sin(1.234567)).epsilon(1e-10));
    CHECK(yp == doctest::Approx(std::cos(1.234567)).epsilon(1e-10));
}

TEST_CASE("expression parser evaluates and differentiates") {
    const Expr e = Expr::parse("exp(0.5*x)*sin(y) + x^3/(1+y^2)");
    CHECK(e.eval({{"x", 1.0}, {"y", 2.0}}) ==
          doctest::Approx(std::exp(0.5) * std::sin(2.0) + 1.0 / 5.0).epsilon(1e-14));
    Field2 f = e.as_field({"x", "y"});
    const double d = f.deriv(1.0, 2.0, 1, 0);
    const double want = 0.5 * std::exp(0.5) * std::sin(2.0) + 3.0 / 5.0;
    CHECK(d == doctest::Approx(want).epsilon(1e-12));
    CHECK_THROWS(Expr::parse("x +* y"));
}

TEST_CASE("cumulative integral is 4th order") {
    std::vector<double> f;
    const int n = 65;
    const double h = 1.0 / (n - 1);
    for (int i = 0; i < n; ++i) f.push_back(std::exp(i * h));
    const auto F = cumulative_integral(f, h);
    CHECK(F.back() == doctest::Approx(std::exp(1.0) - 1).epsilon(1e-9));
}

TEST_CASE("principal data: sphere, torus, plane") {
    // Sphere of radius 2: repeated curvature 0.5 toward the center.
    Immersion2 sphere{[](double u, double v) {
        const T2 tu = T2::variable(u, 0), tv = T2::variable(v, 1);
        return Vec<T2, 3>{2.0 * cos(tu) * cos(tv), 2.0 * cos(tu) * sin(tv),
                          2.0 * sin(tu)};
    }};
    PrincipalOptions opt;
    opt.ref_normal3 = Vec<double, 3>{-std::cos(0.3) * std::cos(0.4),
                                     -std::cos(0.3) * std::sin(0.4), -std::sin(0.3)};
    auto fr = principal_data(sphere, 0.3, 0.4, opt);
    CHECK(fr.degenerate);
    CHECK(fr.k[0] == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(fr.k[1] == doctest::Approx(0.5).epsilon(1e-10));

    // Torus R=2, r=1 at the outer equator: curvatures {1, 1/3}.
    Immersion2 torus{[](double th, double ph) {
        const T2 t = T2::variable(th, 0), p = T2::variable(ph, 1);
        const T2 w = T2(2.0) + cos(t);
        return Vec<T2, 3>{w * cos(p), w * sin(p), sin(t)};
    }};
    PrincipalOptions topt;
    topt.ref_normal3 = Vec<double, 3>{-1, 0, 0}; // inward at theta=0, phi=0
    auto tf = principal_data(torus, 0.0, 0.0, topt);
    CHECK(tf.k[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(tf.k[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-10));

    // Plane: zero curvatures.
    Immersion2 plane{[](double u, double v) {
        return Vec<T2, 3>{T2::variable(u, 0), T2::variable(v, 1), T2(0.0)};
    }};
    auto pf = principal_data(plane, 0.1, 0.2);
    CHECK(std::abs(pf.k[0]) < 1e-14);
    CHECK(std::abs(pf.k[1]) < 1e-14);
}

TEST_CASE("conjugate net coefficients") {
    // Translation surface: r12 = 0.
    Immersion2 tr{[](double u, double v) {
        const T2 tu = T2::variable(u, 0), tv = T2::variable(v, 1);
        return Vec<T2, 3>{tu, tv, sin(tu) + cos(tv)};
    }};
    auto c = conjugate_coeffs_at(tr, 0.3, 0.4);
    CHECK(std::abs(c.a) < 1e-12);
    CHECK(std::abs(c.b) < 1e-12);
    CHECK(c.residual < 1e-12);

    // Asymptotic net of a saddle graph is not conjugate.
    Immersion2 saddle{[](double u, double v) {
        const T2 tu = T2::variable(u, 0), tv = T2::variable(v, 1);
        return Vec<T2, 3>{tu, tv, tu * tv};
    }};
    Grid2 g = Grid2::over(-0.5, 0.5, -0.5, 0.5, 5, 5);
    CHECK_THROWS_AS(conjugate_net_coefficients(saddle, g), NotConjugate);

    // Torus curvature-line chart: a = 0, b = -sin(th)/(2+cos(th)).
    Immersion2 torus{[](double th, double ph) {
        const T2 t = T2::variable(th, 0), p = T2::variable(ph, 1);
        const T2 w = T2(2.0) + cos(t);
        return Vec<T2, 3>{w * cos(p), w * sin(p), sin(t)};
    }};
    auto tc = conjugate_coeffs_at(torus, 0.7, 1.1);
    CHECK(tc.a == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(tc.b ==
          doctest::Approx(-std::sin(0.7) / (2 + std::cos(0.7))).epsilon(1e-10));
}

TEST_CASE("hypersurface principal data on a quadric graph") {
    // x4 = (x1)^2 + 2(x2)^2 + 3(x3)^2, at the origin k = (6,4,2) descending.
    Immersion3 imm{[](double u, double v, double w) {
        const T3 a = T3::variable(u, 0), b = T3::variable(v, 1), c = T3::variable(w, 2);
        return Vec<T3, 4>{a, b, c, a * a + 2.0 * b * b + 3.0 * c * c};
    }};
    PrincipalOptions opt;
    opt.ref_normal4 = Vec<double, 4>{0, 0, 0, 1};
    auto fr = principal_data(imm, 0, 0, 0, opt);
    CHECK(fr.k[0] == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(fr.k[1] == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(fr.k[2] == doctest::Approx(2.0).epsilon(1e-12));
}
