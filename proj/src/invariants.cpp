#include "liesphere/invariants.hpp"

#include <cmath>

#include "liesphere/errors.hpp"
#include "liesphere/parallel.hpp"
#include "liesphere/quadrature.hpp"

namespace liesphere {

namespace {

constexpr double kUmbilicEps = 1e-8;
constexpr double kCurvatureFloor = 1e-12;
constexpr double kZeroFieldEps = 1e-9;

void check_not_umbilic(double k1, double k2) {
    if (std::abs(k1 - k2) < kUmbilicEps * (std::abs(k1) + std::abs(k2) + kCurvatureFloor))
        throw UmbilicPoint("k1 == k2 at sample point");
}

} // namespace

ChartJets chart_jets(const CurvatureLineChart& chart, double u, double v) {
    return {chart.k1.jet_at(u, v), chart.k2.jet_at(u, v), chart.g11.jet_at(u, v),
            chart.g22.jet_at(u, v)};
}

InvariantPoint invariants_at(const CurvatureLineChart& chart, double u, double v) {
    const auto J = chart_jets(chart, u, v);
    InvariantPoint out{};
    out.k1 = J.k1.value();
    out.k2 = J.k2.value();
    out.g11 = J.g11.value();
    out.g22 = J.g22.value();
    check_not_umbilic(out.k1, out.k2);

    const T2 kd1 = J.k1.shift(0); // d1 k1
    const T2 kd2 = J.k2.shift(1); // d2 k2
    const T2 dk = J.k1 - J.k2;
    out.quad = (kd1 * kd2 / (dk * dk)).value();
    out.cubic1 = (kd1 * J.g11).value();
    out.cubic3 = (kd2 * J.g22).value();

    const double kscale = std::abs(out.k1) + std::abs(out.k2) + kCurvatureFloor;
    const double dscale = kscale / (std::abs(chart.r1max - chart.r1min) +
                                    std::abs(chart.r2max - chart.r2min));
    out.generic = std::abs(kd1.value()) > 1e-7 * dscale &&
                  std::abs(kd2.value()) > 1e-7 * dscale;
    if (!out.generic) return out;

    // Lie-invariant 1-forms: the sixth root acts on a ratio of squares, so
    // the radicand is positive; the prefactors carry the signs.
    const T2 X = (kd2 * kd2 * J.g11) / (kd1 * kd1 * J.g22);
    out.omega1 = (kd1 / dk * pow(X, 1.0 / 6.0)).value();
    out.omega2 = (kd2 / (-dk) * pow(X, -1.0 / 6.0)).value();

    // Web connection and its curvature.
    const T2 Om1 = kd2.shift(0) / kd2 + kd1 / dk;
    const T2 Om2 = kd1.shift(1) / kd1 + kd2 / (-dk);
    out.Omega1 = Om1.value();
    out.Omega2 = Om2.value();
    const T2 L = kd1 * kd2 / (dk * dk * dk * dk * dk * sqrt(J.g11 * J.g22));
    const T2 conn1 = (Om1 + L.shift(0) / L) / 3.0;
    const T2 conn2 = (Om2 + L.shift(1) / L) / 3.0;
    out.conn1 = conn1.value();
    out.conn2 = conn2.value();
    out.curv = conn2.shift(0).value() - conn1.shift(1).value();
    out.dOmega = Om2.shift(0).value() - Om1.shift(1).value();
    out.curv_scale = std::abs(Om2.shift(0).value()) + std::abs(Om1.shift(1).value());
    return out;
}

Forms2D lie_forms(const CurvatureLineChart& chart, const Grid2& grid) {
    Forms2D F{grid,
              GridField2(grid, std::vector<double>(grid.size())),
              GridField2(grid, std::vector<double>(grid.size())),
              GridField2(grid, std::vector<double>(grid.size())),
              GridField2(grid, std::vector<double>(grid.size())),
              GridField2(grid, std::vector<double>(grid.size())),
              GridField2(grid, std::vector<double>(grid.size())),
              GridField2(grid, std::vector<double>(grid.size())),
              GridField2(grid, std::vector<double>(grid.size())),
              GridField2(grid, std::vector<double>(grid.size())),
              GridField2(grid, std::vector<double>(grid.size())),
              GridField2(grid, std::vector<double>(grid.size()))};
    std::vector<int> generic_count(grid.ny, 0);
    std::vector<double> cscale(grid.ny, 0.0);
    parallel_for(grid.ny, [&](int j) {
        for (int i = 0; i < grid.nx; ++i) {
            const auto p = invariants_at(chart, grid.x(i), grid.y(j));
            cscale[j] = std::max(cscale[j], p.curv_scale);
            F.quad.at(i, j) = p.quad;
            F.cubic1.at(i, j) = p.cubic1;
            F.cubic3.at(i, j) = p.cubic3;
            F.omega1.at(i, j) = p.omega1;
            F.omega2.at(i, j) = p.omega2;
            F.conn1.at(i, j) = p.conn1;
            F.conn2.at(i, j) = p.conn2;
            F.Omega1.at(i, j) = p.Omega1;
            F.Omega2.at(i, j) = p.Omega2;
            F.curv.at(i, j) = p.curv;
            F.dOmega.at(i, j) = p.dOmega;
            if (p.generic) ++generic_count[j];
        }
    });
    int total = 0;
    for (int c : generic_count) total += c;
    F.genericity_fraction = static_cast<double>(total) / grid.size();
    for (double c : cscale) F.curv_scale = std::max(F.curv_scale, c);
    return F;
}

std::pair<GridField2, GridField2> lie_one_forms(const CurvatureLineChart& chart,
                                                const Grid2& grid) {
    const auto F = lie_forms(chart, grid);
    if (F.genericity_fraction < 0.8)
        throw DegenerateInvariant("d_i k^i vanishes on more than isolated points");
    return {F.omega1, F.omega2};
}

WebConnection web_connection(const CurvatureLineChart& chart, const Grid2& grid) {
    const auto F = lie_forms(chart, grid);
    if (F.genericity_fraction < 0.8)
        throw DegenerateInvariant("d_i k^i vanishes on more than isolated points");
    WebConnection W{F.conn1, F.conn2, F.Omega1, F.Omega2, F.curv, F.dOmega, 0.0};
    double worst = 0.0;
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i)
            worst = std::max(worst, std::abs(W.curv.at(i, j) - W.dOmega.at(i, j) / 3.0));
    W.identity_residual = worst;
    return W;
}

MobiusLaguerreForms mobius_laguerre_forms(const CurvatureLineChart& chart,
                                          const Grid2& grid) {
    auto blank = [&]() { return GridField2(grid, std::vector<double>(grid.size())); };
    MobiusLaguerreForms M{blank(), blank(), blank(), blank(),
                          blank(), blank(), blank(), blank()};
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            const auto J = chart_jets(chart, grid.x(i), grid.y(j));
            check_not_umbilic(J.k1.value(), J.k2.value());
            const T2 dk = J.k1 - J.k2;
            M.mobius1.at(i, j) = (J.k1.shift(0) / dk).value();
            M.mobius2.at(i, j) = (J.k2.shift(1) / (-dk)).value();
            M.mquad1.at(i, j) = (dk * dk * J.g11).value();
            M.mquad2.at(i, j) = (dk * dk * J.g22).value();
            if (std::abs(J.k1.value()) < 1e-12 || std::abs(J.k2.value()) < 1e-12)
                throw ZeroCurvature("Laguerre forms need nonzero principal curvatures");
            const T2 w1 = recip(J.k1), w2 = recip(J.k2);
            const T2 dw = w1 - w2;
            const T2 G11 = J.k1 * J.k1 * J.g11, G22 = J.k2 * J.k2 * J.g22;
            M.laguerre1.at(i, j) = (w1.shift(0) / dw).value();
            M.laguerre2.at(i, j) = (w2.shift(1) / (-dw)).value();
            M.lquad1.at(i, j) = (dw * dw * G11).value();
            M.lquad2.at(i, j) = (dw * dw * G22).value();
        }
    return M;
}

std::pair<double, double> functionals(const CurvatureLineChart& chart, Functional which,
                                      const Grid2& grid) {
    auto density = [&](double u, double v) -> std::pair<double, double> {
        const auto J = chart_jets(chart, u, v);
        check_not_umbilic(J.k1.value(), J.k2.value());
        const T2 dk = J.k1 - J.k2;
        switch (which) {
            case Functional::Lie13: {
                const double d = (J.k1.shift(0) * J.k2.shift(1) / (dk * dk)).value();
                return {d, d};
            }
            case Functional::Ab31: {
                // density -a b from the curvature route and the same number
                // through the rotation coefficients of the metric
                const T2 a = J.k1.shift(1) / (-dk);
                const T2 b = J.k2.shift(0) / dk;
                const double d1 = -(a * b).value();
                const T2 H1 = sqrt(J.g11), H2 = sqrt(J.g22);
                const T2 beta12 = H2.shift(0) / H1;
                const T2 beta21 = H1.shift(1) / H2;
                return {d1, -(beta12 * beta21).value()};
            }
            case Functional::Willmore: {
                const double d = (dk * dk * sqrt(J.g11 * J.g22)).value();
                return {d, d};
            }
            case Functional::Laguerre: {
                if (std::abs(J.k1.value()) < 1e-12 || std::abs(J.k2.value()) < 1e-12)
                    throw ZeroCurvature("Laguerre functional needs k != 0");
                const T2 w1 = recip(J.k1), w2 = recip(J.k2);
                const T2 dw = w1 - w2;
                const T2 G11 = J.k1 * J.k1 * J.g11, G22 = J.k2 * J.k2 * J.g22;
                const double d = (dw * dw * sqrt(G11 * G22)).value();
                return {d, d};
            }
        }
        return {0, 0};
    };
    auto component = [&](bool second) {
        return integrate_2d(
            [&](double u, double v) {
                const auto d = density(u, v);
                const double val = second ? d.second : d.first;
                if (!std::isfinite(val))
                    throw NonIntegrable("unbounded functional density");
                return val;
            },
            grid.x0, grid.x0 + grid.hx * (grid.periodic_x ? grid.nx : grid.nx - 1),
            grid.y0, grid.y0 + grid.hy * (grid.periodic_y ? grid.ny : grid.ny - 1),
            grid.nx, grid.ny, grid.periodic_x, grid.periodic_y);
    };
    const double first = component(false);
    const double second = (which == Functional::Ab31) ? component(true) : first;
    return {first, second};
}

std::array<double, 2> cubic_representative(double c1, double c3, double scale) {
    const double eps = kZeroFieldEps * (scale + 1e-300);
    if (std::abs(c1) > eps) return {1.0, c3 / c1};
    if (std::abs(c3) > eps) return {0.0, 1.0};
    return {0.0, 0.0};
}

// ---- hypersurfaces ---------------------------------------------------------

FrameField3 frame_field(const Immersion3& imm) {
    FrameField3 f;
    auto immc = imm;
    f.at = [immc](const std::array<double, 3>& p) {
        return principal_data(immc, p[0], p[1], p[2]);
    };
    return f;
}

namespace {

// Sign-match a neighbouring frame to the reference one (sorting already
// fixes the order away from degeneracies). Flipping direction i flips
// omega^i and the i-th kd column.
void align_frame(const PrincipalFrame3& ref, PrincipalFrame3& fr) {
    for (int i = 0; i < 3; ++i) {
        double dp = 0;
        for (int a = 0; a < 3; ++a) dp += ref.dir[i][a] * fr.dir[i][a];
        if (dp < 0) {
            for (int a = 0; a < 3; ++a) {
                fr.dir[i][a] = -fr.dir[i][a];
                fr.omega[i][a] = -fr.omega[i][a];
            }
            for (int r = 0; r < 3; ++r) fr.kd[r][i] = -fr.kd[r][i];
        }
    }
}

} // namespace

HyperInvariants hypersurface_invariants(const FrameField3& frames,
                                        const std::array<double, 3>& point) {
    const PrincipalFrame3 fr = frames.at(point);
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            if (std::abs(fr.k[i] - fr.k[j]) <
                kUmbilicEps * (std::abs(fr.k[i]) + std::abs(fr.k[j]) + kCurvatureFloor))
                throw RepeatedCurvature("principal curvatures coincide");

    HyperInvariants H{};
    H.k = fr.k;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            H.quad[i][j] = (i == j) ? 0.0
                                    : fr.kd[i][i] * fr.kd[j][j] /
                                          ((fr.k[i] - fr.k[j]) * (fr.k[i] - fr.k[j]));
    for (int i = 0; i < 3; ++i) H.cubic[i] = fr.kd[i][i] * fr.g[i];
    // covectors, index pattern (i; j, l) cyclic
    for (int i = 0; i < 3; ++i) {
        const int j = (i + 1) % 3, l = (i + 2) % 3;
        H.covector[i] = fr.kd[i][i] * (fr.k[j] - fr.k[l]) /
                        ((fr.k[i] - fr.k[j]) * (fr.k[i] - fr.k[l]));
    }
    H.density_52 = fr.kd[0][0] * fr.kd[1][1] * fr.kd[2][2] /
                   ((fr.k[0] - fr.k[1]) * (fr.k[0] - fr.k[2]) * (fr.k[1] - fr.k[2]));
    for (int i = 0; i < 3; ++i) {
        double prod = 1.0;
        for (int l = 0; l < 3; ++l)
            if (l != i) prod *= (fr.k[i] - fr.k[l]);
        H.conf_quad[i] = fr.g[i] * prod * prod; // exponent 2/(n-2) = 2 for n = 3
    }
    for (int i = 0; i < 3; ++i) {
        double s = 0.0;
        for (int l = 0; l < 3; ++l)
            if (l != i) s += (fr.kd[l][i] - fr.kd[i][i] / 2.0) / (fr.k[i] - fr.k[l]);
        H.omega_n[i] = s;
    }

    // Structure constants and exterior derivatives by centered differences of
    // the frame field, neighbours aligned to the center frame.
    const double h = frames.fd_step;
    std::array<PrincipalFrame3, 6> nb; // +u,-u,+v,-v,+w,-w
    for (int a = 0; a < 3; ++a)
        for (int s = 0; s < 2; ++s) {
            auto p = point;
            p[a] += (s == 0 ? h : -h);
            auto f2 = frames.at(p);
            align_frame(fr, f2);
            nb[2 * a + s] = f2;
        }
    // d(omega^i) in coordinate components
    std::array<std::array<std::array<double, 3>, 3>, 3> domg{}; // [i][alpha][beta]
    auto dcomp = [&](int i, int alpha, int beta) {
        // d/du^alpha of omega^i_beta
        return (nb[2 * alpha].omega[i][beta] - nb[2 * alpha + 1].omega[i][beta]) /
               (2 * h);
    };
    for (int i = 0; i < 3; ++i)
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) domg[i][a][b] = dcomp(i, a, b);
    // coefficient of omega^j ^ omega^k (j < k) in d omega^i
    auto to_frame_2form = [&](const std::array<std::array<double, 3>, 3>& c_ab) {
        std::array<double, 3> out{}; // (1,2),(2,0),(0,1) pairs -> store cyclic (jk)
        for (int idx = 0; idx < 3; ++idx) {
            const int j = (idx + 1) % 3, k = (idx + 2) % 3;
            double s = 0.0;
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    s += c_ab[a][b] * fr.dir[j][a] * fr.dir[k][b];
            out[idx] = s;
        }
        return out;
    };
    for (int i = 0; i < 3; ++i) {
        // c[a][b] chosen so that sum c[a][b] X^a Y^b = domega^i(X, Y); the
        // frame projection then yields the coefficient on omega^j ^ omega^k.
        std::array<std::array<double, 3>, 3> c{};
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) c[a][b] = domg[i][a][b] - domg[i][b][a];
        const auto fc = to_frame_2form(c);
        H.structure_c[i] = fc[i]; // coefficient of omega^j ^ omega^k, (i;j,k) cyclic
    }

    // d Omega for the 1-form with coefficients omega_n in the coframe:
    // Omega = f_i omega^i; dOmega = df_i ^ omega^i + f_i d omega^i.
    auto omega_n_at = [&](const PrincipalFrame3& f) {
        std::array<double, 3> v{};
        for (int i = 0; i < 3; ++i) {
            double s = 0.0;
            for (int l = 0; l < 3; ++l)
                if (l != i) s += (f.kd[l][i] - f.kd[i][i] / 2.0) / (f.k[i] - f.k[l]);
            v[i] = s;
        }
        return v;
    };
    // coordinate components of Omega and their coordinate curls
    auto coord_coeff = [&](const PrincipalFrame3& f) {
        const auto fi = omega_n_at(f);
        std::array<double, 3> c{};
        for (int a = 0; a < 3; ++a)
            for (int i = 0; i < 3; ++i) c[a] += fi[i] * f.omega[i][a];
        return c;
    };
    std::array<std::array<double, 3>, 3> dOm{}; // [alpha][beta] = d_alpha Omega_beta
    for (int a = 0; a < 3; ++a) {
        const auto cp = coord_coeff(nb[2 * a]);
        const auto cm = coord_coeff(nb[2 * a + 1]);
        for (int b = 0; b < 3; ++b) dOm[a][b] = (cp[b] - cm[b]) / (2 * h);
    }
    std::array<std::array<double, 3>, 3> curlc{};
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) curlc[a][b] = dOm[a][b] - dOm[b][a];
    H.domega_n = to_frame_2form(curlc);

    // Holonomicity dichotomy on the distinct-index structure constants.
    double cscale = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int a = 0; a < 3; ++a)
            cscale = std::max(cscale, std::abs(domg[i][a][(a + 1) % 3]));
    const double tol = 1e-5 * (cscale + 1.0);
    const bool z0 = std::abs(H.structure_c[0]) < tol;
    const bool z1 = std::abs(H.structure_c[1]) < tol;
    const bool z2 = std::abs(H.structure_c[2]) < tol;
    if (z0 && z1 && z2) {
        H.holonomic = true;
    } else if (!z0 && !z1 && !z2) {
        H.holonomic = false;
        // Normalize omega^i -> p_i omega^i so the distinct-index coefficients
        // become +1: p_i^2 = C_j C_k (cyclic). Real when all same sign after a
        // possible global orientation flip.
        double C[3] = {H.structure_c[0], H.structure_c[1], H.structure_c[2]};
        if (C[0] < 0 && C[1] < 0 && C[2] < 0)
            for (auto& c : C) c = -c;
        if (C[0] > 0 && C[1] > 0 && C[2] > 0) {
            std::array<double, 3> p{};
            for (int i = 0; i < 3; ++i) p[i] = std::sqrt(C[(i + 1) % 3] * C[(i + 2) % 3]);
            H.normalization = p;
        }
    } else {
        throw NormalizationFailure(
            "structure constants with distinct indices vanish only partially");
    }
    return H;
}

} // namespace liesphere
