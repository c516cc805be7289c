#include "liesphere/mvn.hpp"

#include <cmath>

#include "liesphere/errors.hpp"
#include "liesphere/invariants.hpp"
#include "liesphere/ode.hpp"
#include "liesphere/quadrature.hpp"

namespace liesphere {

std::string class_name(SurfaceClass c) {
    switch (c) {
        case SurfaceClass::Dupin: return "dupin";
        case SurfaceClass::DiagonallyCyclidic: return "diagonally_cyclidic";
        case SurfaceClass::Generic: return "generic";
    }
    return "?";
}

Classification classify(const CurvatureLineChart& chart, const Grid2& grid) {
    Classification out{};
    // Cubic form coefficients and their natural scale.
    double cub = 0.0, kscale = 0.0, gscale = 0.0;
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            const double x = grid.x(i), y = grid.y(j);
            const auto J = chart_jets(chart, x, y);
            const double c1 = (J.k1.shift(0) * J.g11).value();
            const double c3 = (J.k2.shift(1) * J.g22).value();
            cub = std::max({cub, std::abs(c1), std::abs(c3)});
            kscale = std::max({kscale, std::abs(J.k1.value()), std::abs(J.k2.value())});
            gscale = std::max({gscale, std::abs(J.g11.value()), std::abs(J.g22.value())});
        }
    const double extent = std::abs(chart.r1max - chart.r1min) +
                          std::abs(chart.r2max - chart.r2min);
    out.cubic_max = cub;
    out.cubic_scale = kscale * gscale / (extent + 1e-300) + 1e-300;
    if (cub < 1e-9 * out.cubic_scale) {
        out.label = SurfaceClass::Dupin;
        return out;
    }
    const Forms2D F = lie_forms(chart, grid);
    if (F.genericity_fraction < 0.8)
        throw DegenerateInvariant("web curvature undefined: d_i k^i vanishes");
    out.curv_max = F.curv.max_abs();
    out.curv_scale = F.curv_scale + 1e-300;
    out.label = (out.curv_max < 1e-6 * out.curv_scale) ? SurfaceClass::DiagonallyCyclidic
                                                       : SurfaceClass::Generic;
    return out;
}

MvnFieldSet tzitzeica_ansatz(const Field2& U, Reduction red) {
    const double sign = (red == Reduction::Lie) ? -1.0 : 1.0;
    auto Uc = U;
    MvnFieldSet out;
    out.U_or_p = U;
    out.reduction = red;
    out.gauge = "ansatz";
    out.W = Field2::closed([Uc, sign](double x, double y) {
        const T2 u = Uc.jet_at(x, y);
        if (u.value() <= 0.0) throw NonPositiveDensity("ansatz needs positive density");
        const T2 uy = u.shift(1);
        return sign * ((2.0 / 3.0) * uy.shift(1) / u - (1.0 / 3.0) * (uy / u) * (uy / u));
    });
    out.V = Field2::closed([Uc, sign](double x, double y) {
        const T2 u = Uc.jet_at(x, y);
        if (u.value() <= 0.0) throw NonPositiveDensity("ansatz needs positive density");
        const T2 ux = u.shift(0);
        return sign * ((2.0 / 3.0) * ux.shift(0) / u - (1.0 / 3.0) * (ux / u) * (ux / u));
    });
    return out;
}

MvnResiduals mvn_residuals(const MvnFieldSet& f, const Grid2& grid) {
    FieldMap fields;
    if (f.reduction == Reduction::Lie) {
        fields = {{"U", f.U_or_p}, {"V", f.V}, {"W", f.W}};
        const auto R = residual("mvn_lie", fields, grid);
        return {R.max_abs, R.max_constraint};
    }
    fields = {{"p", f.U_or_p}, {"V", f.V}, {"W", f.W}};
    const auto R = residual("mvn_projective", fields, grid);
    return {R.max_abs, R.max_constraint};
}

TravellingWave travelling_wave(double c, double u0, double up0, double smin, double smax,
                               Reduction red) {
    if (!(u0 > 0.0)) throw NonPositiveDensity("travelling wave needs U0 > 0");
    const double sign = (red == Reduction::Lie) ? -1.0 : 1.0;
    auto g = [sign, c](double y, double) { return sign * std::exp(2 * y) + c * std::exp(-y); };
    auto ode = std::make_shared<DenseOde1>(g, 0.0, std::log(u0), up0 / u0, 1e-3);
    auto ok = [](double y, double yp) {
        return std::abs(y) < 18.0 && std::abs(yp) < 1e6;
    };
    ode->extend(smin, smax, ok);
    TravellingWave tw;
    tw.umin = std::exp(ode->ymin());
    tw.umax = std::exp(ode->ymax());
    tw.field = Field2::closed([ode, sign, c](double x, double y) {
        const double s = x + y;
        double yv, yp;
        ode->eval(s, yv, yp);
        const double e2 = std::exp(2 * yv), em = std::exp(-yv);
        const double y2 = sign * e2 + c * em;
        const double gp = 2 * sign * e2 - c * em;
        const double gpp = 4 * sign * e2 + c * em;
        const double y3 = gp * yp;
        const double y4 = gpp * yp * yp + gp * y2;
        std::array<double, T2::kMaxComposeOrder + 1> coef{};
        coef[0] = yv;
        coef[1] = yp;
        coef[2] = y2 / 2;
        coef[3] = y3 / 6;
        coef[4] = y4 / 24;
        const T2 sjet = T2::variable(x, 0) + T2::variable(y, 1);
        return exp(T2::compose(sjet, coef));
    });
    return tw;
}

namespace {

/// Re-express a jet under a linear change of variables: the old coordinate
/// increments are (a11 dx + a12 dy, a21 dx + a22 dy).
T2 substitute_linear(const T2& J, double a11, double a12, double a21, double a22) {
    T2 A = T2::variable(0.0, 0) * a11 + T2::variable(0.0, 1) * a12;
    T2 B = T2::variable(0.0, 0) * a21 + T2::variable(0.0, 1) * a22;
    std::array<T2, 5> Ap, Bp;
    Ap[0] = T2(1.0);
    Bp[0] = T2(1.0);
    for (int k = 1; k <= 4; ++k) {
        Ap[k] = Ap[k - 1] * A;
        Bp[k] = Bp[k - 1] * B;
    }
    T2 K(0.0);
    for (int a = 0; a <= 4; ++a)
        for (int b = 0; b <= 4; ++b) {
            const double c = J.raw(a + 5 * b);
            if (c != 0.0) K += Ap[a] * Bp[b] * c;
        }
    return K;
}

double calapso_of(const T2& u) {
    const T2 w = u.shift(0).shift(1) / u;
    return w.derivative(2, 0) + w.derivative(0, 2) + 0.5 * (u * u).derivative(1, 1);
}

double ds2_of(const T2& u) {
    const T2 w = (u.shift(0).shift(0) - u.shift(1).shift(1)) / u;
    const T2 u2 = u * u;
    return w.derivative(2, 0) + w.derivative(0, 2) + u2.derivative(2, 0) -
           u2.derivative(0, 2);
}

} // namespace

CalapsoDs2 calapso_ds2_equivalence(const Field2& u, const Grid2& grid) {
    CalapsoDs2 out{GridField2(grid, std::vector<double>(grid.size())),
                   GridField2(grid, std::vector<double>(grid.size())), 0.0};
    double scale = 0.0;
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            const double R1 = grid.x(i), R2 = grid.y(j);
            const T2 uj = u.jet_at(R1, R2);
            if (uj.value() == 0.0) throw ZeroDivision("density vanishes");
            out.res_calapso.at(i, j) = calapso_of(uj);
            // (x, y) with R1 = x+y, R2 = x-y; old increments dR1 = dx+dy,
            // dR2 = dx-dy. The chain rule contributes the constant factor 8.
            const T2 utilde = substitute_linear(uj, 1, 1, 1, -1);
            out.res_ds2_transformed.at(i, j) = ds2_of(utilde) / 8.0;
            scale = std::max(scale, std::abs(out.res_calapso.at(i, j)));
        }
    double worst = 0.0;
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i)
            worst = std::max(worst, std::abs(out.res_calapso.at(i, j) -
                                             out.res_ds2_transformed.at(i, j)));
    out.max_rel_disagreement = worst / (scale + 1e-300);
    return out;
}

// ---- projective reconstruction ---------------------------------------------

namespace {

struct ProjFields {
    Field2 p, V, W;
};

// State layout: [a, b, f, then per component (r, rx, ry, rxy)].
constexpr int kAbf = 3;
constexpr int kPerComp = 4;

std::vector<double> proj_rhs(const ProjFields& F, double x, double y,
                             const std::vector<double>& s, bool xdir) {
    const T2 pj = F.p.jet_at(x, y);
    const double p = pj.value(), px = pj.derivative(1, 0), py = pj.derivative(0, 1);
    const double pxx = pj.derivative(2, 0), pyy = pj.derivative(0, 2);
    const double V = F.V.value(x, y), W = F.W.value(x, y);
    const double a = s[0], b = s[1], f = s[2];
    std::vector<double> d(s.size());
    if (xdir) {
        d[0] = py + b * p + 0.5 * a * a - 1.5 * V;
        d[1] = f;
        d[2] = pyy + a * p * p + 0.5 * p * b * b - 1.5 * p * W + b * py + a * f -
               2 * p * px;
    } else {
        d[0] = f;
        d[1] = px + a * p + 0.5 * b * b - 1.5 * W;
        d[2] = pxx + b * p * p + 0.5 * p * a * a - 1.5 * p * V + a * px + b * f -
               2 * p * py;
    }
    for (size_t c = kAbf; c + kPerComp <= s.size(); c += kPerComp) {
        const double r = s[c], rx = s[c + 1], ry = s[c + 2], z = s[c + 3];
        if (xdir) {
            d[c] = rx;
            d[c + 1] = a * rx + p * ry;
            d[c + 2] = z;
            d[c + 3] = f * rx + a * z + py * ry + p * (p * rx + b * ry);
        } else {
            d[c] = ry;
            d[c + 1] = z;
            d[c + 2] = p * rx + b * ry;
            d[c + 3] = px * rx + p * (a * rx + p * ry) + f * ry + b * z;
        }
    }
    return d;
}

// Classical RK4 along one axis with a fixed number of substeps per cell.
std::vector<double> rk4_line(const ProjFields& F, double fixed, double t0, double t1,
                             std::vector<double> s, bool xdir, int substeps) {
    const double h = (t1 - t0) / substeps;
    auto rhs = [&](double t, const std::vector<double>& y) {
        return xdir ? proj_rhs(F, t, fixed, y, true) : proj_rhs(F, fixed, t, y, false);
    };
    for (int q = 0; q < substeps; ++q) {
        const double t = t0 + q * h;
        const auto k1 = rhs(t, s);
        std::vector<double> tmp(s.size());
        for (size_t i = 0; i < s.size(); ++i) tmp[i] = s[i] + 0.5 * h * k1[i];
        const auto k2 = rhs(t + 0.5 * h, tmp);
        for (size_t i = 0; i < s.size(); ++i) tmp[i] = s[i] + 0.5 * h * k2[i];
        const auto k3 = rhs(t + 0.5 * h, tmp);
        for (size_t i = 0; i < s.size(); ++i) tmp[i] = s[i] + h * k3[i];
        const auto k4 = rhs(t + h, tmp);
        for (size_t i = 0; i < s.size(); ++i)
            s[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    }
    return s;
}

} // namespace

ProjectiveReconstruction reconstruct_projective_surface(const MvnFieldSet& fields,
                                                        const ProjectiveSeeds& seeds,
                                                        const Grid2& grid, double tol) {
    if (fields.reduction != Reduction::Projective)
        throw SchemaViolation("reconstruction expects the projective reduction");
    ProjFields F{fields.U_or_p, fields.V, fields.W};
    const int nx = grid.nx, ny = grid.ny;
    const int nstate = kAbf + 3 * kPerComp;
    std::vector<double> s0(nstate, 0.0);
    s0[0] = seeds.a0;
    s0[1] = seeds.b0;
    s0[2] = seeds.f0;
    for (int c = 0; c < 3; ++c)
        for (int q = 0; q < 4; ++q) s0[kAbf + c * kPerComp + q] = seeds.r_jets[c][q];

    const int sub = 2; // substeps per grid cell
    auto sweep = [&](bool x_first) {
        std::vector<std::vector<double>> out(static_cast<size_t>(nx) * ny);
        if (x_first) {
            std::vector<std::vector<double>> base(nx);
            base[0] = s0;
            for (int i = 1; i < nx; ++i)
                base[i] = rk4_line(F, grid.y0, grid.x(i - 1), grid.x(i), base[i - 1],
                                   true, sub);
            for (int i = 0; i < nx; ++i) {
                out[i] = base[i];
                auto s = base[i];
                for (int j = 1; j < ny; ++j) {
                    s = rk4_line(F, grid.x(i), grid.y(j - 1), grid.y(j), s, false, sub);
                    out[static_cast<size_t>(j) * nx + i] = s;
                }
            }
        } else {
            std::vector<std::vector<double>> base(ny);
            base[0] = s0;
            for (int j = 1; j < ny; ++j)
                base[j] = rk4_line(F, grid.x0, grid.y(j - 1), grid.y(j), base[j - 1],
                                   false, sub);
            for (int j = 0; j < ny; ++j) {
                out[static_cast<size_t>(j) * nx] = base[j];
                auto s = base[j];
                for (int i = 1; i < nx; ++i) {
                    s = rk4_line(F, grid.y(j), grid.x(i - 1), grid.x(i), s, true, sub);
                    out[static_cast<size_t>(j) * nx + i] = s;
                }
            }
        }
        return out;
    };
    const auto A = sweep(true);
    const auto B = sweep(false);

    double scale = 1.0;
    for (const auto& s : A)
        for (double v : s) scale = std::max(scale, std::abs(v));
    double path = 0.0;
    for (size_t q = 0; q < A.size(); ++q)
        for (int i = 0; i < nstate; ++i)
            path = std::max(path, std::abs(A[q][i] - B[q][i]) / scale);

    ProjectiveReconstruction R{grid,
                               GridField2(grid, std::vector<double>(grid.size())),
                               GridField2(grid, std::vector<double>(grid.size())),
                               GridField2(grid, std::vector<double>(grid.size())),
                               {GridField2(grid, std::vector<double>(grid.size())),
                                GridField2(grid, std::vector<double>(grid.size())),
                                GridField2(grid, std::vector<double>(grid.size()))},
                               path,
                               0.0};
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const auto& s = A[static_cast<size_t>(j) * nx + i];
            R.a.at(i, j) = s[0];
            R.b.at(i, j) = s[1];
            R.f.at(i, j) = s[2];
            for (int c = 0; c < 3; ++c) R.r[c].at(i, j) = s[kAbf + c * kPerComp];
        }
    if (path > tol)
        throw IncompatibleData("sweep discrepancy " + std::to_string(path) +
                               "; fields do not satisfy the mVN system");

    // Residual of the linear system on the reconstructed immersion.
    double worst = 0.0;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double x = grid.x(i), y = grid.y(j);
            const double p = F.p.value(x, y);
            const double a = R.a.at(i, j), b = R.b.at(i, j);
            for (int c = 0; c < 3; ++c) {
                const double rxx = R.r[c].deriv_at(i, j, 2, 0);
                const double ryy = R.r[c].deriv_at(i, j, 0, 2);
                const double rx = R.r[c].deriv_at(i, j, 1, 0);
                const double ry = R.r[c].deriv_at(i, j, 0, 1);
                worst = std::max(worst, std::abs(rxx - a * rx - p * ry));
                worst = std::max(worst, std::abs(ryy - p * rx - b * ry));
            }
        }
    R.eq47_residual = worst;
    return R;
}

// ---- Goursat march for the diagonally-cyclidic system ----------------------

namespace {

// Order-4 derivative of a sampled row (centered interior, one-sided ends).
std::vector<double> row_deriv(const std::vector<double>& f, double h) {
    const int n = static_cast<int>(f.size());
    std::vector<double> d(n);
    for (int i = 0; i < n; ++i) {
        if (i >= 2 && i + 2 < n) {
            d[i] = (8 * (f[i + 1] - f[i - 1]) - (f[i + 2] - f[i - 2])) / (12 * h);
        } else {
            const int base = std::clamp(i - 2, 0, n - 5);
            static const double W[5][5] = {
                {-25. / 12, 4., -3., 4. / 3, -1. / 4},
                {-1. / 4, -5. / 6, 3. / 2, -1. / 2, 1. / 12},
                {1. / 12, -2. / 3, 0., 2. / 3, -1. / 12},
                {-1. / 12, 1. / 2, -3. / 2, 5. / 6, 1. / 4},
                {1. / 4, -4. / 3, 3., -4., 25. / 12}};
            const int off = i - base;
            double s = 0.0;
            for (int q = 0; q < 5; ++q) s += W[off][q] * f[base + q];
            d[i] = s / h;
        }
    }
    return d;
}

double callable_deriv(const std::function<double(double)>& f, double x, double h,
                      int order) {
    if (order == 1) return (8 * (f(x + h) - f(x - h)) - (f(x + 2 * h) - f(x - 2 * h))) / (12 * h);
    // order 2
    return (-(f(x + 2 * h) + f(x - 2 * h)) + 16 * (f(x + h) + f(x - h)) - 30 * f(x)) /
           (12 * h * h);
}

} // namespace

Solve44Result solve_44(const Seed44& seed, const Grid2& grid, int fixpoint_iters) {
    // Global Picard iteration on the integral form of the system. The third
    // equation contains rho only through e^{2 rho}, so it resolves rho
    // algebraically from the curvature jets; the first two equations then
    // propagate ln(d_i k^i) by quadrature along their own directions, and the
    // curvatures are rebuilt from the transversal seed lines.
    const int nx = grid.nx, ny = grid.ny;
    const double h1 = grid.hx, h2 = grid.hy;
    auto blank = [&]() { return GridField2(grid, std::vector<double>(grid.size())); };
    GridField2 K1 = blank(), K2 = blank(), RHO = blank(), P = blank(), Q = blank();

    std::vector<double> k1row(nx), k2row(nx), prow(nx);
    std::vector<double> k1col(ny), k2col(ny), qcol(ny);
    for (int i = 0; i < nx; ++i) {
        const double x = grid.x(i);
        k1row[i] = seed.k1_row(x);
        k2row[i] = seed.k2_row(x);
        prow[i] = callable_deriv(seed.k1_row, x, h1 / 4, 1);
    }
    for (int j = 0; j < ny; ++j) {
        const double y = grid.y(j);
        k1col[j] = seed.k1_col(y);
        k2col[j] = seed.k2_col(y);
        qcol[j] = callable_deriv(seed.k2_col, y, h2 / 4, 1);
    }
    // Additive Goursat extension as the starting iterate.
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            K1.at(i, j) = k1row[i] + k1col[j] - k1row[0];
            K2.at(i, j) = k2row[i] + k2col[j] - k2row[0];
            RHO.at(i, j) = seed.rho_row(grid.x(i)) + seed.rho_col(grid.y(j)) -
                           seed.rho_row(grid.x0);
        }

    std::vector<double> buf(std::max(nx, ny));
    int sign_misses = 0;
    for (int pass = 0; pass < fixpoint_iters; ++pass) {
        // rho from the third equation, pointwise; while the iterate is still
        // rough the sign condition may fail at a few nodes - keep the
        // previous value there and let the next pass repair it.
        const Field2 F1 = Field2::on_grid(K1), F2 = Field2::on_grid(K2);
        sign_misses = 0;
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const T2 j1 = F1.jet_at(grid.x(i), grid.y(j));
                const T2 j2 = F2.jet_at(grid.x(i), grid.y(j));
                const T2 dk = j1 - j2;
                const T2 a = j1.shift(1) / (-dk);
                const T2 b = j2.shift(0) / dk;
                const T2 pj = j1.shift(0), qj = j2.shift(1);
                const T2 lnratio = pj / qj;
                const double t1 =
                    pj.value() * (b.shift(0).value() +
                                  0.5 * b.value() * (lnratio.shift(0) / lnratio).value());
                const double t2 =
                    qj.value() * (a.shift(1).value() -
                                  0.5 * a.value() * (lnratio.shift(1) / lnratio).value());
                const double arg = -(t1 + t2) / (j1.value() * j2.value());
                if (arg > 0)
                    RHO.at(i, j) = 0.5 * std::log(arg);
                else
                    ++sign_misses;
            }
        if (pass + 1 == fixpoint_iters && sign_misses > 0)
            throw StepFailure("third equation cannot resolve rho: sign mismatch at " +
                              std::to_string(sign_misses) + " nodes");
        // p by quadrature of the second equation along R2, per column.
        const double relax = (pass < 4) ? 0.5 : 1.0;
        for (int i = 0; i < nx; ++i) {
            for (int j = 0; j < ny; ++j) {
                const double a = -K1.deriv_at(i, j, 0, 1) /
                                 (K1.at(i, j) - K2.at(i, j));
                buf[j] = 2 * (RHO.deriv_at(i, j, 0, 1) - a);
            }
            std::vector<double> integrand(buf.begin(), buf.begin() + ny);
            const auto I = cumulative_integral(integrand, h2);
            for (int j = 0; j < ny; ++j)
                P.at(i, j) = prow[i] * std::exp(std::clamp(I[j], -30.0, 30.0));
        }
        // k1 rebuilt along rows from the column seed.
        for (int j = 0; j < ny; ++j) {
            std::vector<double> integrand(nx);
            for (int i = 0; i < nx; ++i) integrand[i] = P.at(i, j);
            const auto I = cumulative_integral(integrand, h1);
            for (int i = 0; i < nx; ++i)
                K1.at(i, j) += relax * (k1col[j] + I[i] - K1.at(i, j));
        }
        // q by quadrature of the first equation along R1, per row.
        for (int j = 0; j < ny; ++j) {
            std::vector<double> integrand(nx);
            for (int i = 0; i < nx; ++i) {
                const double b = K2.deriv_at(i, j, 1, 0) /
                                 (K1.at(i, j) - K2.at(i, j));
                integrand[i] = 2 * (RHO.deriv_at(i, j, 1, 0) - b);
            }
            const auto I = cumulative_integral(integrand, h1);
            for (int i = 0; i < nx; ++i)
                Q.at(i, j) = qcol[j] * std::exp(std::clamp(I[i], -30.0, 30.0));
        }
        // k2 rebuilt along columns from the row seed.
        for (int i = 0; i < nx; ++i) {
            std::vector<double> integrand(ny);
            for (int j = 0; j < ny; ++j) integrand[j] = Q.at(i, j);
            const auto I = cumulative_integral(integrand, h2);
            for (int j = 0; j < ny; ++j)
                K2.at(i, j) += relax * (k2row[i] + I[j] - K2.at(i, j));
        }
    }
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            if (std::abs(P.at(i, j)) < 1e-10 || std::abs(Q.at(i, j)) < 1e-10)
                throw GenericityLoss("d_i k^i crossed zero during the iteration");

    Solve44Result R{CurvatureLineChart{}, K1, K2, RHO, {0, 0, 0}};
    FieldMap fm{{"k1", Field2::on_grid(K1)},
                {"k2", Field2::on_grid(K2)},
                {"rho", Field2::on_grid(RHO)}};
    const auto res = residual("eq4.4", fm, grid);
    for (int c = 0; c < 3; ++c) {
        double m = 0;
        const auto& f = res.components[c];
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) m = std::max(m, std::abs(f.at(i, j)));
        R.residuals[c] = m;
    }

    GridField2 G11 = blank(), G22 = blank();
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double e2r = std::exp(2 * RHO.at(i, j));
            G11.at(i, j) = e2r / P.at(i, j);
            G22.at(i, j) = e2r / Q.at(i, j);
        }
    R.chart.r1min = grid.x0;
    R.chart.r1max = grid.x(nx - 1);
    R.chart.r2min = grid.y0;
    R.chart.r2max = grid.y(ny - 1);
    R.chart.n1 = nx;
    R.chart.n2 = ny;
    R.chart.k1 = Field2::on_grid(K1);
    R.chart.k2 = Field2::on_grid(K2);
    R.chart.g11 = Field2::on_grid(G11);
    R.chart.g22 = Field2::on_grid(G22);
    return R;
}

// ---- density and potentials ------------------------------------------------

DensityCheck lie_density_mvn_check(const CurvatureLineChart& chart, const Grid2& grid,
                                   const GaugeSpec& gauge) {
    GridField2 U(grid, std::vector<double>(grid.size()));
    GridField2 dU2x(grid, std::vector<double>(grid.size()));
    GridField2 dU2y(grid, std::vector<double>(grid.size()));
    double minrad = 1e300, radscale = 0.0;
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            const auto J = chart_jets(chart, grid.x(i), grid.y(j));
            const T2 kd1 = J.k1.shift(0), kd2 = J.k2.shift(1);
            const T2 dk = J.k1 - J.k2;
            const T2 rad = kd1 * kd2 / (dk * dk);
            minrad = std::min(minrad, rad.value());
            radscale = std::max(radscale, std::abs(rad.value()));
            if (rad.value() > 0) {
                U.at(i, j) = std::sqrt(rad.value());
                dU2x.at(i, j) = rad.derivative(1, 0);
                dU2y.at(i, j) = rad.derivative(0, 1);
            }
        }
    if (minrad < -1e-12 * (radscale + 1e-300))
        throw NegativeRadicand("d1k1 * d2k2 < 0: the density is not real here");

    // W from d1 W = d2(U^2), V from d2 V = d1(U^2), gauged per spec.
    GridField2 W(grid, std::vector<double>(grid.size()));
    GridField2 V(grid, std::vector<double>(grid.size()));
    for (int j = 0; j < grid.ny; ++j) {
        std::vector<double> f(grid.nx);
        for (int i = 0; i < grid.nx; ++i) f[i] = dU2y.at(i, j);
        const auto I = cumulative_integral(f, grid.hx);
        const double base =
            (gauge.kind == GaugeSpec::Supplied && gauge.w_base) ? gauge.w_base(grid.y(j)) : 0.0;
        for (int i = 0; i < grid.nx; ++i) W.at(i, j) = base + I[i];
    }
    for (int i = 0; i < grid.nx; ++i) {
        std::vector<double> f(grid.ny);
        for (int j = 0; j < grid.ny; ++j) f[j] = dU2x.at(i, j);
        const auto I = cumulative_integral(f, grid.hy);
        const double base =
            (gauge.kind == GaugeSpec::Supplied && gauge.v_base) ? gauge.v_base(grid.x(i)) : 0.0;
        for (int j = 0; j < grid.ny; ++j) V.at(i, j) += base + I[j];
    }
    if (gauge.kind == GaugeSpec::ZeroMean) {
        auto demean = [&](GridField2& F) {
            double m = 0;
            for (double v : F.data()) m += v;
            m /= F.data().size();
            for (double& v : F.data()) v -= m;
        };
        demean(W);
        demean(V);
    }
    DensityCheck out{U, V, W, minrad, {0, 0}};
    MvnFieldSet fs{Field2::on_grid(U), Field2::on_grid(V), Field2::on_grid(W),
                   Reduction::Lie, "quadrature"};
    out.residuals = mvn_residuals(fs, grid);
    return out;
}

// ---- auxiliary chain --------------------------------------------------------

namespace {

struct ChainFields {
    Field2 U, V, W;
};

struct UJet {
    double u, ux, uy, uxx, uyy, lxy, G, H;
};

UJet ujet_at(const ChainFields& F, double x, double y) {
    const T2 u = F.U.jet_at(x, y);
    UJet J;
    J.u = u.value();
    if (J.u <= 0) throw NonPositiveDensity("chain needs positive density");
    J.ux = u.derivative(1, 0);
    J.uy = u.derivative(0, 1);
    J.uxx = u.derivative(2, 0);
    J.uyy = u.derivative(0, 2);
    J.lxy = log(u).derivative(1, 1);
    J.G = -3 * F.W.value(x, y) - 2 * J.uyy / J.u + (J.uy / J.u) * (J.uy / J.u);
    J.H = 3 * F.V.value(x, y) + 2 * J.uxx / J.u - (J.ux / J.u) * (J.ux / J.u);
    return J;
}

// State: k, m, n, A, B, F, lndelta, rho.
std::array<double, 8> chain_rhs(const ChainFields& Fl, double x, double y,
                                const std::array<double, 8>& s, bool xdir) {
    const UJet J = ujet_at(Fl, x, y);
    const double k = s[0], m = s[1], n = s[2], A = s[3], B = s[4], F = s[5];
    const double ek = std::exp(k), emk = std::exp(-k);
    const double u = J.u;
    std::array<double, 8> d{};
    if (xdir) {
        const double dk = -J.ux / u + emk * n;
        d[0] = dk;
        d[1] = (J.ux / u) * m - emk * (J.lxy - u * (m - n) + m * n);
        d[2] = ek * ek * F + 0.5 * emk * (3 * n * n + 4 * n * u + u * u) -
               2 * n * J.ux / u - 3 * J.ux + 0.5 * ek * J.H;
        d[3] = A * B + u * u + u * m;
        d[4] = -B * (J.ux / u - emk * n) - 0.5 * ek * ek * A * A + 0.5 * B * B - ek * F;
        d[5] = -F * (J.ux / u - emk * n) + ek * ek * u * m * (u + m) +
               0.5 * u * (J.G + 2 * emk * F - ek * ek * (3 * m * m + 4 * m * u + u * u));
        d[6] = u * emk - B;
        d[7] = B + 0.5 * (J.ux / u + dk + d[6]);
    } else {
        const double dk = J.uy / u + ek * m;
        d[0] = dk;
        d[1] = emk * emk * F - 0.5 * ek * (3 * m * m + 4 * m * u + u * u) -
               2 * m * J.uy / u - 3 * J.uy + 0.5 * emk * J.G;
        d[2] = (J.uy / u) * n + ek * (J.lxy + u * (m - n) + m * n);
        d[3] = -A * (J.uy / u + ek * m) + 0.5 * A * A - 0.5 * emk * emk * B * B + emk * F;
        d[4] = A * B + u * u + u * n;
        d[5] = -F * (J.uy / u + ek * m) + emk * emk * u * n * (u + n) -
               0.5 * u * (J.H + 2 * ek * F + emk * emk * (3 * n * n + 4 * n * u + u * u));
        d[6] = -A - u * ek;
        d[7] = A + 0.5 * (J.uy / u - dk + d[6]);
    }
    return d;
}

std::array<double, 8> chain_rk4(const ChainFields& F, double fixed, double t0, double t1,
                                std::array<double, 8> s, bool xdir, int substeps) {
    const double h = (t1 - t0) / substeps;
    auto rhs = [&](double t, const std::array<double, 8>& y) {
        return xdir ? chain_rhs(F, t, fixed, y, true) : chain_rhs(F, fixed, t, y, false);
    };
    for (int q = 0; q < substeps; ++q) {
        const double t = t0 + q * h;
        const auto k1 = rhs(t, s);
        std::array<double, 8> tmp;
        for (int i = 0; i < 8; ++i) tmp[i] = s[i] + 0.5 * h * k1[i];
        const auto k2 = rhs(t + 0.5 * h, tmp);
        for (int i = 0; i < 8; ++i) tmp[i] = s[i] + 0.5 * h * k2[i];
        const auto k3 = rhs(t + 0.5 * h, tmp);
        for (int i = 0; i < 8; ++i) tmp[i] = s[i] + h * k3[i];
        const auto k4 = rhs(t + h, tmp);
        for (int i = 0; i < 8; ++i) s[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    }
    return s;
}

} // namespace

AuxChainState appendix_chain(const MvnFieldSet& fields, const ChainSeeds& seeds,
                             const Grid2& grid, double tol) {
    if (fields.reduction != Reduction::Lie)
        throw SchemaViolation("the auxiliary chain uses the lie reduction");
    ChainFields F{fields.U_or_p, fields.V, fields.W};
    const int nx = grid.nx, ny = grid.ny;
    std::array<double, 8> s0{seeds.k, seeds.m, seeds.n, seeds.A, seeds.B, seeds.F, 0, 0};

    const int sub = 2;
    auto sweep = [&](bool x_first) {
        std::vector<std::array<double, 8>> out(static_cast<size_t>(nx) * ny);
        if (x_first) {
            std::vector<std::array<double, 8>> base(nx);
            base[0] = s0;
            for (int i = 1; i < nx; ++i)
                base[i] = chain_rk4(F, grid.y0, grid.x(i - 1), grid.x(i), base[i - 1],
                                    true, sub);
            for (int i = 0; i < nx; ++i) {
                out[i] = base[i];
                auto s = base[i];
                for (int j = 1; j < ny; ++j) {
                    s = chain_rk4(F, grid.x(i), grid.y(j - 1), grid.y(j), s, false, sub);
                    out[static_cast<size_t>(j) * nx + i] = s;
                }
            }
        } else {
            std::vector<std::array<double, 8>> base(ny);
            base[0] = s0;
            for (int j = 1; j < ny; ++j)
                base[j] = chain_rk4(F, grid.x0, grid.y(j - 1), grid.y(j), base[j - 1],
                                    false, sub);
            for (int j = 0; j < ny; ++j) {
                out[static_cast<size_t>(j) * nx] = base[j];
                auto s = base[j];
                for (int i = 1; i < nx; ++i) {
                    s = chain_rk4(F, grid.y(j), grid.x(i - 1), grid.x(i), s, true, sub);
                    out[static_cast<size_t>(j) * nx + i] = s;
                }
            }
        }
        return out;
    };
    const auto SA = sweep(true);
    const auto SB = sweep(false);
    double scale = 1.0, path = 0.0;
    for (const auto& s : SA)
        for (int i = 0; i < 6; ++i) scale = std::max(scale, std::abs(s[i]));
    for (size_t q = 0; q < SA.size(); ++q)
        for (int i = 0; i < 6; ++i)
            path = std::max(path, std::abs(SA[q][i] - SB[q][i]) / scale);

    auto blank = [&]() { return GridField2(grid, std::vector<double>(grid.size())); };
    AuxChainState out{grid,    blank(), blank(), blank(), blank(), blank(),
                      blank(), blank(), blank(), blank(), path,    {0, 0, 0, 0, 0},
                      0.0};
    GridField2 Ug = blank();
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const auto& s = SA[static_cast<size_t>(j) * nx + i];
            out.k.at(i, j) = s[0];
            out.m.at(i, j) = s[1];
            out.n.at(i, j) = s[2];
            out.A.at(i, j) = s[3];
            out.B.at(i, j) = s[4];
            out.F.at(i, j) = s[5];
            out.rho.at(i, j) = s[7];
            const UJet J = ujet_at(F, grid.x(i), grid.y(j));
            out.G.at(i, j) = J.G;
            out.H.at(i, j) = J.H;
            Ug.at(i, j) = J.u;
        }
    if (path > tol)
        throw IncompatibleData("chain sweeps disagree by " + std::to_string(path));

    // Residuals of the coupled relations, worst over the grid (FD order 4).
    GridField2 ekA = blank(), emkB = blank(), Uemk = blank(), Uek = blank(),
               GU2 = blank(), HU2 = blank();
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double k = out.k.at(i, j), u = Ug.at(i, j);
            ekA.at(i, j) = std::exp(k) * out.A.at(i, j);
            emkB.at(i, j) = std::exp(-k) * out.B.at(i, j);
            Uemk.at(i, j) = u * std::exp(-k);
            Uek.at(i, j) = u * std::exp(k);
            GU2.at(i, j) = out.G.at(i, j) * u * u;
            HU2.at(i, j) = out.H.at(i, j) * u * u;
        }
    double r3 = 0, r4 = 0, r5 = 0, r6 = 0, r13 = 0, rdef = 0;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double u = Ug.at(i, j);
            const double AB = out.A.at(i, j) * out.B.at(i, j);
            r3 = std::max(r3, std::abs(out.k.deriv_at(i, j, 1, 1) -
                                       (out.A.deriv_at(i, j, 1, 0) -
                                        out.B.deriv_at(i, j, 0, 1))));
            r4 = std::max(r4, std::abs(ekA.deriv_at(i, j, 0, 1) +
                                       emkB.deriv_at(i, j, 1, 0)));
            r5 = std::max(r5, std::abs(out.A.deriv_at(i, j, 1, 0) -
                                       (AB + u * u - Uemk.deriv_at(i, j, 0, 1))));
            r6 = std::max(r6, std::abs(out.B.deriv_at(i, j, 0, 1) -
                                       (AB + u * u + Uek.deriv_at(i, j, 1, 0))));
            r13 = std::max(r13, std::abs(GU2.deriv_at(i, j, 0, 1) +
                                         HU2.deriv_at(i, j, 1, 0)));
            const UJet J = ujet_at(F, grid.x(i), grid.y(j));
            const double k = out.k.at(i, j);
            rdef = std::max(
                {rdef,
                 std::abs(out.k.deriv_at(i, j, 1, 0) + J.ux / u -
                          std::exp(-k) * out.n.at(i, j)),
                 std::abs(out.k.deriv_at(i, j, 0, 1) - J.uy / u -
                          std::exp(k) * out.m.at(i, j))});
        }
    out.relation_residuals = {r3, r4, r5, r6, r13};
    out.def_residual = rdef;
    return out;
}

} // namespace liesphere
