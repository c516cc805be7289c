#include "liesphere/residuals.hpp"

#include <cmath>
#include <functional>

#include "liesphere/errors.hpp"
#include "liesphere/parallel.hpp"

namespace liesphere {

namespace {

const Field2& need(const FieldMap& f, const std::string& name) {
    auto it = f.find(name);
    if (it == f.end() || !it->second.valid())
        throw MissingField("equation needs field '" + name + "'");
    return it->second;
}

double param(const std::map<std::string, double>& p, const std::string& name,
             double dflt) {
    auto it = p.find(name);
    return it == p.end() ? dflt : it->second;
}

using PointFn = std::function<std::vector<double>(double, double)>;

ResidualReport assemble(const std::string& eq, const Grid2& grid, int ncomp, int ncons,
                        const PointFn& values) {
    ResidualReport R;
    R.eq = eq;
    R.combined = GridField2(grid, std::vector<double>(grid.size()));
    for (int c = 0; c < ncomp; ++c)
        R.components.emplace_back(grid, std::vector<double>(grid.size()));
    for (int c = 0; c < ncons; ++c)
        R.constraints.emplace_back(grid, std::vector<double>(grid.size()));
    std::vector<double> rowmax(grid.ny, 0.0), rowcons(grid.ny, 0.0);
    parallel_for(grid.ny, [&](int j) {
        for (int i = 0; i < grid.nx; ++i) {
            const auto v = values(grid.x(i), grid.y(j));
            double m = 0;
            for (int c = 0; c < ncomp; ++c) {
                R.components[c].at(i, j) = v[c];
                m = std::max(m, std::abs(v[c]));
            }
            R.combined.at(i, j) = m;
            rowmax[j] = std::max(rowmax[j], m);
            for (int c = 0; c < ncons; ++c) {
                R.constraints[c].at(i, j) = v[ncomp + c];
                rowcons[j] = std::max(rowcons[j], std::abs(v[ncomp + c]));
            }
        }
    });
    for (int j = 0; j < grid.ny; ++j) {
        R.max_abs = std::max(R.max_abs, rowmax[j]);
        R.max_constraint = std::max(R.max_constraint, rowcons[j]);
    }
    return R;
}

// d1 rho = b + (1/2) d1d2k2/d2k2,  d2 rho = a + (1/2) d1d2k1/d1k1,
// d1k1 (d1b + b/2 d1 ln(d1k1/d2k2)) + d2k2 (d2a + a/2 d2 ln(d2k2/d1k1))
//   + k1 k2 e^{2 rho} = 0.
std::vector<double> system44_at(const T2& k1, const T2& k2, const T2& rho,
                                bool with_gauss) {
    const T2 dk = k1 - k2;
    const T2 a = k1.shift(1) / (-dk);
    const T2 b = k2.shift(0) / dk;
    const T2 p = k1.shift(0); // d1 k1
    const T2 q = k2.shift(1); // d2 k2
    const double r1 = rho.shift(0).value() - b.value() -
                      0.5 * (q.shift(0) / q).value();
    const double r2 = rho.shift(1).value() - a.value() -
                      0.5 * (p.shift(1) / p).value();
    const T2 lnratio = p / q;
    const double t1 =
        p.value() * (b.shift(0).value() +
                     0.5 * b.value() * (lnratio.shift(0) / lnratio).value());
    const double t2 =
        q.value() * (a.shift(1).value() -
                     0.5 * a.value() * (lnratio.shift(1) / lnratio).value());
    double r3 = t1 + t2;
    if (with_gauss) r3 += (k1 * k2 * exp(2.0 * rho)).value();
    return {r1, r2, r3};
}

// isothermic system: d1 rho = b, d2 rho = a, laplace(rho) + k1 k2 e^{2rho} = 0
std::vector<double> system45_at(const T2& k1, const T2& k2, const T2& rho) {
    const T2 dk = k1 - k2;
    const T2 a = k1.shift(1) / (-dk);
    const T2 b = k2.shift(0) / dk;
    return {rho.shift(0).value() - b.value(), rho.shift(1).value() - a.value(),
            rho.derivative(2, 0) + rho.derivative(0, 2) +
                (k1 * k2 * exp(2.0 * rho)).value()};
}

double calapso_at(const T2& u) {
    const T2 w = u.shift(0).shift(1) / u;
    return w.derivative(2, 0) + w.derivative(0, 2) +
           0.5 * (u * u).derivative(1, 1);
}

double ds2_at(const T2& u) {
    // laplace((u_xx - u_yy)/u) + (u^2)_xx - (u^2)_yy for real u
    const T2 w = (u.shift(0).shift(0) - u.shift(1).shift(1)) / u;
    const T2 u2 = u * u;
    return w.derivative(2, 0) + w.derivative(0, 2) + u2.derivative(2, 0) -
           u2.derivative(0, 2);
}

// mVN first equation, lie reduction:
//   d1^3 U + 3 V d1U + (3/2) U d1V = d2^3 U + 3 W d2U + (3/2) U d2W
// with constraints d1W = d2(U^2), d2V = d1(U^2).
std::vector<double> mvn_lie_at(const T2& U, const T2& V, const T2& W) {
    const double lhs = U.derivative(3, 0) + 3 * V.value() * U.derivative(1, 0) +
                       1.5 * U.value() * V.derivative(1, 0);
    const double rhs = U.derivative(0, 3) + 3 * W.value() * U.derivative(0, 1) +
                       1.5 * U.value() * W.derivative(0, 1);
    const T2 U2 = U * U;
    return {lhs - rhs, W.derivative(1, 0) - U2.derivative(0, 1),
            V.derivative(0, 1) - U2.derivative(1, 0)};
}

// projective reduction:
//   p_xxx - 3 V p_x - (3/2) p V_x = p_yyy - 3 W p_y - (3/2) p W_y
// with W_x = (p^2)_y, V_y = (p^2)_x.
std::vector<double> mvn_projective_at(const T2& p, const T2& V, const T2& W) {
    const double lhs = p.derivative(3, 0) - 3 * V.value() * p.derivative(1, 0) -
                       1.5 * p.value() * V.derivative(1, 0);
    const double rhs = p.derivative(0, 3) - 3 * W.value() * p.derivative(0, 1) -
                       1.5 * p.value() * W.derivative(0, 1);
    const T2 p2 = p * p;
    return {lhs - rhs, W.derivative(1, 0) - p2.derivative(0, 1),
            V.derivative(0, 1) - p2.derivative(1, 0)};
}

// compatibility system of the isothermally-asymptotic net (p = q):
//   (p_x + a p + b^2/2 - b_y)_x = (3/2)(p^2)_y
//   (p_y + b p + a^2/2 - a_x)_y = (3/2)(p^2)_x
//   a_y = b_x
std::vector<double> system410_at(const T2& p, const T2& a, const T2& b) {
    const T2 p2 = p * p;
    const T2 e1 = p.shift(0) + a * p + 0.5 * b * b - b.shift(1);
    const T2 e2 = p.shift(1) + b * p + 0.5 * a * a - a.shift(0);
    return {e1.derivative(1, 0) - 1.5 * p2.derivative(0, 1),
            e2.derivative(0, 1) - 1.5 * p2.derivative(1, 0),
            a.derivative(0, 1) - b.derivative(1, 0)};
}

} // namespace

std::vector<std::string> residual_tags() {
    return {"eq4.4",          "eq4.5",         "calapso",
            "ds2_stationary", "mvn_lie",       "mvn_projective",
            "tzitzeica_lie",  "tzitzeica_projective", "liouville",
            "eq4.10"};
}

ResidualReport residual(const std::string& eq, const FieldMap& fields, const Grid2& grid,
                        const std::map<std::string, double>& params) {
    if (eq == "eq4.4" || eq == "eq4.5") {
        const Field2 k1 = need(fields, "k1"), k2 = need(fields, "k2"),
                     rho = need(fields, "rho");
        const bool full = (eq == "eq4.4");
        return assemble(eq, grid, 3, 0, [=](double x, double y) {
            const T2 a = k1.jet_at(x, y), b = k2.jet_at(x, y), r = rho.jet_at(x, y);
            return full ? system44_at(a, b, r, true) : system45_at(a, b, r);
        });
    }
    if (eq == "calapso" || eq == "eq4.6") {
        const Field2 u = need(fields, "u");
        return assemble(eq, grid, 1, 0, [=](double x, double y) {
            return std::vector<double>{calapso_at(u.jet_at(x, y))};
        });
    }
    if (eq == "ds2_stationary") {
        const Field2 u = need(fields, "u");
        return assemble(eq, grid, 1, 0, [=](double x, double y) {
            return std::vector<double>{ds2_at(u.jet_at(x, y))};
        });
    }
    if (eq == "mvn_lie") {
        const Field2 U = need(fields, "U"), V = need(fields, "V"), W = need(fields, "W");
        return assemble(eq, grid, 1, 2, [=](double x, double y) {
            return mvn_lie_at(U.jet_at(x, y), V.jet_at(x, y), W.jet_at(x, y));
        });
    }
    if (eq == "mvn_projective" || eq == "eq4.13") {
        const Field2 p = need(fields, "p"), V = need(fields, "V"), W = need(fields, "W");
        return assemble(eq, grid, 1, 2, [=](double x, double y) {
            return mvn_projective_at(p.jet_at(x, y), V.jet_at(x, y), W.jet_at(x, y));
        });
    }
    if (eq == "tzitzeica_lie" || eq == "tzitzeica_projective" || eq == "liouville") {
        const bool lie = (eq == "tzitzeica_lie");
        const double c = (eq == "liouville") ? 0.0 : param(params, "c", lie ? 1.0 : -1.0);
        const Field2 U = fields.count("U") ? need(fields, "U") : need(fields, "p");
        const double sign = lie ? -1.0 : 1.0;
        return assemble(eq, grid, 1, 0, [=](double x, double y) {
            const T2 u = U.jet_at(x, y);
            if (u.value() <= 0) throw NonPositiveDensity("tzitzeica density must be > 0");
            const T2 lnu = log(u);
            const double res = lnu.derivative(1, 1) -
                               (sign * (u * u).value() + c * recip(u).value());
            return std::vector<double>{res};
        });
    }
    if (eq == "eq4.10") {
        const Field2 p = need(fields, "p"), a = need(fields, "a"), b = need(fields, "b");
        return assemble(eq, grid, 3, 0, [=](double x, double y) {
            return system410_at(p.jet_at(x, y), a.jet_at(x, y), b.jet_at(x, y));
        });
    }
    throw SchemaViolation("unknown equation tag '" + eq + "'");
}

} // namespace liesphere
