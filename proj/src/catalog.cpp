#include "liesphere/catalog.hpp"

#include <cmath>

#include "liesphere/errors.hpp"
#include "liesphere/expr.hpp"
#include "liesphere/ode.hpp"

namespace liesphere {

namespace {

template <typename F>
Field2 jet_field(F f) {
    return Field2::closed(std::move(f));
}

struct ImmJets {
    Vec<T2, 3> r, r1, r2, n; // n unit, oriented by `orient`
    T2 g11, g12, g22, II11, II12, II22;
};

ImmJets immersion_jets(const Immersion2& imm, double u, double v, double orient) {
    ImmJets j;
    j.r = imm.eval(u, v);
    for (int i = 0; i < 3; ++i) {
        j.r1[i] = j.r[i].shift(0);
        j.r2[i] = j.r[i].shift(1);
    }
    auto nc = cross(j.r1, j.r2);
    const T2 inv_len = recip(sqrt(dot(nc, nc)));
    for (int i = 0; i < 3; ++i) j.n[i] = nc[i] * inv_len * orient;
    j.g11 = dot(j.r1, j.r1);
    j.g12 = dot(j.r1, j.r2);
    j.g22 = dot(j.r2, j.r2);
    Vec<T2, 3> r11, r12, r22;
    for (int i = 0; i < 3; ++i) {
        r11[i] = j.r1[i].shift(0);
        r12[i] = j.r1[i].shift(1);
        r22[i] = j.r2[i].shift(1);
    }
    j.II11 = dot(j.n, r11);
    j.II12 = dot(j.n, r12);
    j.II22 = dot(j.n, r22);
    return j;
}

} // namespace

double principal_net_residual(const Immersion2& imm, const Grid2& grid) {
    double worst = 0.0;
    for (int jj = 0; jj < grid.ny; ++jj)
        for (int ii = 0; ii < grid.nx; ++ii) {
            const auto j = immersion_jets(imm, grid.x(ii), grid.y(jj), 1.0);
            const double scale =
                std::abs(j.II11.value()) + std::abs(j.II22.value()) + 1e-12;
            const double offdiag =
                std::abs(j.II12.value()) +
                std::abs(j.g12.value()) / (j.g11.value() + j.g22.value());
            worst = std::max(worst, offdiag / scale);
        }
    return worst;
}

CurvatureLineChart chart_from_immersion(const Immersion2& imm, double r1min, double r1max,
                                        double r2min, double r2max, bool per1, bool per2,
                                        int n1, int n2, double orient, double cross_tol) {
    CurvatureLineChart ch;
    ch.r1min = r1min;
    ch.r1max = r1max;
    ch.r2min = r2min;
    ch.r2max = r2max;
    ch.periodic1 = per1;
    ch.periodic2 = per2;
    ch.n1 = n1;
    ch.n2 = n2;
    ch.immersion = imm;
    const Grid2 check = Grid2::over(r1min, r1max, r2min, r2max, 9, 9, per1, per2);
    const double res = principal_net_residual(imm, check);
    if (res > cross_tol)
        throw NotConjugate("coordinate net is not principal; off-diagonal residual " +
                           std::to_string(res));
    auto immc = imm;
    ch.k1 = jet_field([immc, orient](double u, double v) {
        const auto j = immersion_jets(immc, u, v, orient);
        return j.II11 / j.g11;
    });
    ch.k2 = jet_field([immc, orient](double u, double v) {
        const auto j = immersion_jets(immc, u, v, orient);
        return j.II22 / j.g22;
    });
    ch.g11 = jet_field([immc](double u, double v) {
        const auto j = immersion_jets(immc, u, v, 1.0);
        return j.g11;
    });
    ch.g22 = jet_field([immc](double u, double v) {
        const auto j = immersion_jets(immc, u, v, 1.0);
        return j.g22;
    });
    ch.normal = [immc, orient](double u, double v) {
        return immersion_jets(immc, u, v, orient).n;
    };
    return ch;
}

CurvatureLineChart constant_curvature_chart(double k, double g, double extent) {
    CurvatureLineChart ch;
    ch.r1min = ch.r2min = 0.0;
    ch.r1max = ch.r2max = extent;
    ch.k1 = Field2::constant(k);
    ch.k2 = Field2::constant(k);
    ch.g11 = Field2::constant(g);
    ch.g22 = Field2::constant(g);
    return ch;
}

std::pair<Field2, Field2> third_fundamental_form(const CurvatureLineChart& chart) {
    auto k1 = chart.k1, k2 = chart.k2, g11 = chart.g11, g22 = chart.g22;
    if (k1.is_grid() || g11.is_grid()) {
        const Grid2 g = chart.default_grid();
        auto mk = [&](const Field2& kf, const Field2& gf) {
            GridField2 out(g, std::vector<double>(g.size(), 0.0));
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i) {
                    const double k = kf.value(g.x(i), g.y(j));
                    out.at(i, j) = k * k * gf.value(g.x(i), g.y(j));
                }
            return Field2::on_grid(std::move(out));
        };
        return {mk(k1, g11), mk(k2, g22)};
    }
    return {Field2::closed([k1, g11](double u, double v) {
                const T2 k = k1.jet(u, v);
                return k * k * g11.jet(u, v);
            }),
            Field2::closed([k2, g22](double u, double v) {
                const T2 k = k2.jet(u, v);
                return k * k * g22.jet(u, v);
            })};
}

namespace {

CurvatureLineChart make_plane(int n1, int n2) {
    Immersion2 imm{[](double u, double v) {
        Vec<T2, 3> r{T2::variable(u, 0), T2::variable(v, 1), T2(0.0)};
        return r;
    }};
    CurvatureLineChart ch;
    ch.r1min = -1;
    ch.r1max = 1;
    ch.r2min = -1;
    ch.r2max = 1;
    ch.n1 = n1;
    ch.n2 = n2;
    ch.k1 = Field2::constant(0.0);
    ch.k2 = Field2::constant(0.0);
    ch.g11 = Field2::constant(1.0);
    ch.g22 = Field2::constant(1.0);
    ch.immersion = imm;
    ch.normal = [](double, double) {
        return Vec<T2, 3>{T2(0.0), T2(0.0), T2(1.0)};
    };
    return ch;
}

CurvatureLineChart make_torus(double R, double r, int n1, int n2) {
    if (!(R > r && r > 0)) throw SchemaViolation("torus needs R > r > 0");
    Immersion2 imm{[R, r](double th, double ph) {
        const T2 t = T2::variable(th, 0), p = T2::variable(ph, 1);
        const T2 w = T2(R) + r * cos(t);
        return Vec<T2, 3>{w * cos(p), w * sin(p), r * sin(t)};
    }};
    CurvatureLineChart ch;
    ch.r1min = 0;
    ch.r1max = 2 * M_PI;
    ch.r2min = 0;
    ch.r2max = 2 * M_PI;
    ch.periodic1 = ch.periodic2 = true;
    ch.n1 = n1;
    ch.n2 = n2;
    // Meridian direction is R1. Curvatures refer to the normal pointing into
    // the tube, which keeps the meridian curvature at +1/r.
    ch.k1 = Field2::constant(1.0 / r);
    ch.k2 = jet_field([R, r](double th, double) {
        const T2 t = T2::variable(th, 0);
        return cos(t) / (T2(R) + r * cos(t));
    });
    ch.g11 = Field2::constant(r * r);
    ch.g22 = jet_field([R, r](double th, double) {
        const T2 t = T2::variable(th, 0);
        const T2 w = T2(R) + r * cos(t);
        return w * w;
    });
    ch.immersion = imm;
    ch.normal = [](double th, double ph) {
        const T2 t = T2::variable(th, 0), p = T2::variable(ph, 1);
        return Vec<T2, 3>{-cos(t) * cos(p), -cos(t) * sin(p), -sin(t)};
    };
    return ch;
}

CurvatureLineChart make_revolution(const ExprMap& exprs, const ParamMap& params, int n1,
                                   int n2) {
    auto itf = exprs.find("f");
    auto itg = exprs.find("g");
    if (itf == exprs.end() || itg == exprs.end())
        throw SchemaViolation("surface_of_revolution needs profile expressions f, g of s");
    const Expr fe = Expr::parse(itf->second);
    const Expr ge = Expr::parse(itg->second);
    auto get = [&](const std::string& k, double dflt) {
        auto it = params.find(k);
        return it == params.end() ? dflt : it->second;
    };
    const double s0 = get("smin", -1.0), s1 = get("smax", 1.0);
    Immersion2 imm{[fe, ge](double s, double ph) {
        std::map<std::string, T2> vars{{"s", T2::variable(s, 0)}};
        const T2 f = fe.eval2(vars);
        const T2 g = ge.eval2(vars);
        const T2 p = T2::variable(ph, 1);
        return Vec<T2, 3>{f * cos(p), f * sin(p), g};
    }};
    auto ch = chart_from_immersion(imm, s0, s1, 0, 2 * M_PI, false, true, n1, n2, 1.0);
    return ch;
}

CurvatureLineChart make_ellipsoid(const ParamMap& params, int n1, int n2) {
    auto get = [&](const std::string& k, double dflt) {
        auto it = params.find(k);
        return it == params.end() ? dflt : it->second;
    };
    double a = get("a", 1.0), b = get("b", 2.0), c = get("c", 3.0);
    // Sort semi-axes descending so the coordinate ranges interlace.
    double ax[3] = {a, b, c};
    std::sort(ax, ax + 3, std::greater<double>());
    const double A = ax[0] * ax[0], B = ax[1] * ax[1], C = ax[2] * ax[2];
    if (!(A > B && B > C))
        throw UmbilicInDomain("ellipsoid_confocal needs three distinct semi-axes");
    const double mu = get("margin", 0.15);
    const double u0 = -B + mu * (B - C), u1 = -C - mu * (B - C);
    const double v0 = -A + mu * (A - B), v1 = -B - mu * (A - B);
    Immersion2 imm{[A, B, C](double u, double v) {
        const T2 tu = T2::variable(u, 0), tv = T2::variable(v, 1);
        const T2 x2 = (A * (T2(A) + tu) * (T2(A) + tv)) / ((A - B) * (A - C));
        const T2 y2 = (B * (T2(B) + tu) * (T2(B) + tv)) / ((B - A) * (B - C));
        const T2 z2 = (C * (T2(C) + tu) * (T2(C) + tv)) / ((C - A) * (C - B));
        return Vec<T2, 3>{sqrt(x2), sqrt(y2), sqrt(z2)};
    }};
    // Orientation: pick the sign that makes both curvatures positive
    // (the normal into the convex body).
    const double um = 0.5 * (u0 + u1), vm = 0.5 * (v0 + v1);
    const auto probe = immersion_jets(imm, um, vm, 1.0);
    const double h = probe.II11.value() / probe.g11.value() +
                     probe.II22.value() / probe.g22.value();
    const double orient = h > 0 ? 1.0 : -1.0;
    return chart_from_immersion(imm, u0, u1, v0, v1, false, false, n1, n2, orient);
}

CurvatureLineChart make_cyclide(const ParamMap& params, int n1, int n2) {
    auto get = [&](const std::string& k, double dflt) {
        auto it = params.find(k);
        return it == params.end() ? dflt : it->second;
    };
    const double a = get("a", 2.0), b = get("b", 1.9), mu = get("mu", 1.0);
    const double c = std::sqrt(a * a - b * b);
    if (!(c < mu && mu < b))
        throw SchemaViolation("dupin_cyclide needs c < mu < b for a ring cyclide");
    Immersion2 imm{[a, b, c, mu](double th, double ps) {
        const T2 t = T2::variable(th, 0), p = T2::variable(ps, 1);
        const T2 den = T2(a) - c * cos(t) * cos(p);
        const T2 x = (mu * (T2(c) - a * cos(t) * cos(p)) + b * b * cos(t)) / den;
        const T2 y = (b * sin(t) * (T2(a) - mu * cos(p))) / den;
        const T2 z = (b * sin(p) * (c * cos(t) - T2(mu))) / den;
        return Vec<T2, 3>{x, y, z};
    }};
    const auto probe = immersion_jets(imm, 0.3, 0.4, 1.0);
    const double h = probe.II11.value() / probe.g11.value() +
                     probe.II22.value() / probe.g22.value();
    const double orient = h > 0 ? 1.0 : -1.0;
    return chart_from_immersion(imm, 0, 2 * M_PI, 0, 2 * M_PI, true, true, n1, n2,
                                orient);
}

// ---- graph_patch ----------------------------------------------------------
//
// Builds curvature-line coordinates for a graph z = F(x, y) by integrating
// the two principal direction fields. X1 is the principal direction closer
// to the x-axis (oriented to +x), X2 the other one (oriented to +y). Labels:
//   u(p) = x-coordinate where the X2 curve through p crosses y = y0,
//   v(p) = y-coordinate where the X1 curve through p crosses x = x0.
// u is constant along X2 curves and v along X1 curves, so the map
// (R1, R2) = (u, v) has curvature lines as coordinate lines. Net nodes are
// found by marching X2 curves from the y = y0 axis and locating the
// requested v-levels along them.

struct GraphField {
    Immersion2 imm;
    // principal directions in parameter coordinates, axis-aligned binding
    void dirs(double x, double y, double d1[2], double d2[2], double k[2]) const {
        auto fr = principal_data(imm, x, y);
        // fr.dir[0] belongs to the larger curvature; rebind by axis alignment
        const double* cand[2] = {fr.dir[0].data(), fr.dir[1].data()};
        int i1 = (std::abs(cand[0][0]) >= std::abs(cand[1][0])) ? 0 : 1;
        int i2 = 1 - i1;
        double s1 = cand[i1][0] >= 0 ? 1.0 : -1.0;
        double s2 = cand[i2][1] >= 0 ? 1.0 : -1.0;
        d1[0] = s1 * cand[i1][0];
        d1[1] = s1 * cand[i1][1];
        d2[0] = s2 * cand[i2][0];
        d2[1] = s2 * cand[i2][1];
        k[0] = fr.k[i1];
        k[1] = fr.k[i2];
    }
};

CurvatureLineChart make_graph_patch(const ExprMap& exprs, const ParamMap& params, int n1,
                                    int n2) {
    auto itF = exprs.find("F");
    if (itF == exprs.end()) throw SchemaViolation("graph_patch needs expression F of x, y");
    const Expr Fe = Expr::parse(itF->second);
    auto get = [&](const std::string& k, double dflt) {
        auto it = params.find(k);
        return it == params.end() ? dflt : it->second;
    };
    const double ax = get("xmin", -0.5), bx = get("xmax", 0.5);
    const double ay = get("ymin", -0.5), by = get("ymax", 0.5);
    const double odetol = get("ode_tol", 1e-10);

    Immersion2 imm{[Fe](double x, double y) {
        std::map<std::string, T2> vars{{"x", T2::variable(x, 0)}, {"y", T2::variable(y, 1)}};
        return Vec<T2, 3>{T2::variable(x, 0), T2::variable(y, 1), Fe.eval2(vars)};
    }};
    GraphField gf{imm};

    const double x0 = 0.5 * (ax + bx), y0 = 0.5 * (ay + by);

    // v label: follow the X1 curve to x = x0 (ODE in x).
    auto v_label = [&](double x, double y) {
        OdeFn f = [&](double t, const std::vector<double>& s, std::vector<double>& d) {
            (void)t;
            double d1[2], d2[2], k[2];
            gf.dirs(t, s[0], d1, d2, k);
            d[0] = d1[1] / d1[0];
        };
        auto res = rk45(f, x, x0, {y}, odetol, std::abs(bx - ax) / 8);
        return res.y[0];
    };

    // Inner safe box for the chart range (curves bend, stay away from edges).
    const double fr = 0.30;
    const double u_lo = x0 - fr * (bx - ax), u_hi = x0 + fr * (bx - ax);
    const double v_lo = y0 - fr * (by - ay), v_hi = y0 + fr * (by - ay);

    std::vector<double> us(n1), vs(n2);
    for (int i = 0; i < n1; ++i) us[i] = u_lo + (u_hi - u_lo) * i / (n1 - 1);
    for (int j = 0; j < n2; ++j) vs[j] = v_lo + (v_hi - v_lo) * j / (n2 - 1);

    std::vector<double> Px(n1 * n2), Py(n1 * n2);
    for (int i = 0; i < n1; ++i) {
        // March the X2 curve through (u_i, y0) in y; v is monotone along it.
        OdeFn f = [&](double t, const std::vector<double>& s, std::vector<double>& d) {
            double d1[2], d2[2], k[2];
            gf.dirs(s[0], t, d1, d2, k);
            d[0] = d2[0] / d2[1];
        };
        auto locate = [&](double vtarget) {
            // Find y with v(x(y), y) = vtarget by a guarded secant on the
            // curve parametrized by y.
            double ylo = y0, yhi = y0;
            std::vector<double> slo = {us[i]}, shi = {us[i]};
            double vlo = v_label(us[i], y0), vhi = vlo;
            int guard = 0;
            while ((vtarget - vlo) * (vtarget - vhi) > 0) {
                if (vtarget > vhi) {
                    const double ynext = yhi + (by - ay) / 16;
                    shi = rk45(f, yhi, ynext, shi, odetol).y;
                    yhi = ynext;
                    vhi = v_label(shi[0], yhi);
                } else {
                    const double ynext = ylo - (by - ay) / 16;
                    slo = rk45(f, ylo, ynext, slo, odetol).y;
                    ylo = ynext;
                    vlo = v_label(slo[0], ylo);
                }
                if (++guard > 64) throw StepFailure("graph_patch net: v level not bracketed");
            }
            // Bisection refinement on y between the brackets.
            double ya = ylo, yb = yhi;
            std::vector<double> sa = slo;
            double va = vlo;
            for (int it = 0; it < 60; ++it) {
                const double ym = 0.5 * (ya + yb);
                auto sm = rk45(f, ya, ym, sa, odetol).y;
                const double vm = v_label(sm[0], ym);
                if ((vtarget - va) * (vtarget - vm) <= 0) {
                    yb = ym;
                } else {
                    ya = ym;
                    sa = sm;
                    va = vm;
                }
                if (std::abs(yb - ya) < 1e-12 * (1 + std::abs(ya))) break;
            }
            auto sfin = rk45(f, ya, 0.5 * (ya + yb), sa, odetol).y;
            return std::pair<double, double>(sfin[0], 0.5 * (ya + yb));
        };
        for (int j = 0; j < n2; ++j) {
            auto [px, py] = locate(vs[j]);
            Px[j * n1 + i] = px;
            Py[j * n1 + i] = py;
        }
    }

    // Chart fields on the net.
    Grid2 g = Grid2::over(us.front(), us.back(), vs.front(), vs.back(), n1, n2);
    GridField2 fx(g, Px), fy(g, Py);
    GridField2 k1f(g, std::vector<double>(g.size())), k2f = k1f, g11f = k1f, g22f = k1f;
    for (int j = 0; j < n2; ++j)
        for (int i = 0; i < n1; ++i) {
            const double x = fx.at(i, j), y = fy.at(i, j);
            double d1[2], d2[2], k[2];
            gf.dirs(x, y, d1, d2, k);
            k1f.at(i, j) = k[0];
            k2f.at(i, j) = k[1];
            // chart metric: |dPhi/dR|^2 in the graph first fundamental form
            const auto jj = immersion_jets(imm, x, y, 1.0);
            const double E = jj.g11.value(), Fc = jj.g12.value(), G = jj.g22.value();
            const double tx1 = fx.deriv_at(i, j, 1, 0), ty1 = fy.deriv_at(i, j, 1, 0);
            const double tx2 = fx.deriv_at(i, j, 0, 1), ty2 = fy.deriv_at(i, j, 0, 1);
            g11f.at(i, j) = E * tx1 * tx1 + 2 * Fc * tx1 * ty1 + G * ty1 * ty1;
            g22f.at(i, j) = E * tx2 * tx2 + 2 * Fc * tx2 * ty2 + G * ty2 * ty2;
        }

    CurvatureLineChart ch;
    ch.r1min = us.front();
    ch.r1max = us.back();
    ch.r2min = vs.front();
    ch.r2max = vs.back();
    ch.n1 = n1;
    ch.n2 = n2;
    ch.k1 = Field2::on_grid(k1f);
    ch.k2 = Field2::on_grid(k2f);
    ch.g11 = Field2::on_grid(g11f);
    ch.g22 = Field2::on_grid(g22f);
    // Backing immersion through the net map (R1,R2) -> (x,y) -> graph.
    auto fxs = std::make_shared<GridField2>(fx);
    auto fys = std::make_shared<GridField2>(fy);
    auto Fe2 = Fe;
    ch.immersion = Immersion2{[fxs, fys, Fe2, g](double R1, double R2) {
        // Local polynomial jet of the net map (order-4 cross stencils).
        int i = std::clamp(static_cast<int>(std::lround((R1 - g.x0) / g.hx)), 0, g.nx - 1);
        int j = std::clamp(static_cast<int>(std::lround((R2 - g.y0) / g.hy)), 0, g.ny - 1);
        T2 X(fxs->at(i, j)), Y(fys->at(i, j));
        for (int a = 0; a <= 2; ++a)
            for (int b = 0; b <= 2; ++b) {
                if (a + b == 0) continue;
                double fa = 1.0;
                for (int q = 2; q <= a; ++q) fa *= q;
                for (int q = 2; q <= b; ++q) fa *= q;
                // write Taylor coefficients directly
                const int idx = a + 5 * b;
                X.raw(idx) = fxs->deriv_at(i, j, a, b) / fa;
                Y.raw(idx) = fys->deriv_at(i, j, a, b) / fa;
            }
        std::map<std::string, T2> vars{{"x", X}, {"y", Y}};
        return Vec<T2, 3>{X, Y, Fe2.eval2(vars)};
    }};
    return ch;
}

} // namespace

CurvatureLineChart curvature_chart(const std::string& id, const ParamMap& params, int n1,
                                   int n2, const ExprMap& exprs) {
    auto get = [&](const std::string& k, double dflt) {
        auto it = params.find(k);
        return it == params.end() ? dflt : it->second;
    };
    if (id == "plane") return make_plane(n1, n2);
    if (id == "sphere")
        throw UmbilicInDomain("every point of a sphere is umbilic; no curvature-line chart");
    if (id == "torus_of_revolution" || id == "torus")
        return make_torus(get("R", 2.0), get("r", 1.0), n1, n2);
    if (id == "surface_of_revolution") return make_revolution(exprs, params, n1, n2);
    if (id == "ellipsoid_confocal" || id == "ellipsoid") return make_ellipsoid(params, n1, n2);
    if (id == "dupin_cyclide") return make_cyclide(params, n1, n2);
    if (id == "graph_patch") return make_graph_patch(exprs, params, n1, n2);
    throw UnknownCatalogId(id);
}

} // namespace liesphere
