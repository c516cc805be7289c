#include "liesphere/geometry.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "liesphere/errors.hpp"

namespace liesphere {

namespace {

constexpr double kUmbilicEps = 1e-8;
constexpr double kCurvatureFloor = 1e-12;

template <typename T, std::size_t N>
Vec<T, N> axis_shift(const Vec<T, N>& v, int axis) {
    Vec<T, N> r;
    for (std::size_t i = 0; i < N; ++i) r[i] = v[i].shift(axis);
    return r;
}

// 4D cross product: the vector orthogonal to a, b, c (cofactor expansion).
template <typename T>
Vec<T, 4> cross4(const Vec<T, 4>& a, const Vec<T, 4>& b, const Vec<T, 4>& c) {
    auto det3 = [](const T& a0, const T& a1, const T& a2, const T& b0, const T& b1,
                   const T& b2, const T& c0, const T& c1, const T& c2) {
        return a0 * (b1 * c2 - b2 * c1) - a1 * (b0 * c2 - b2 * c0) +
               a2 * (b0 * c1 - b1 * c0);
    };
    Vec<T, 4> n;
    n[0] = det3(a[1], a[2], a[3], b[1], b[2], b[3], c[1], c[2], c[3]);
    n[1] = -det3(a[0], a[2], a[3], b[0], b[2], b[3], c[0], c[2], c[3]);
    n[2] = det3(a[0], a[1], a[3], b[0], b[1], b[3], c[0], c[1], c[3]);
    n[3] = -det3(a[0], a[1], a[2], b[0], b[1], b[2], c[0], c[1], c[2]);
    return n;
}

template <int N>
struct FrameTraits;
template <>
struct FrameTraits<2> {
    using Frame = PrincipalFrame2;
    using Mat = Eigen::Matrix2d;
};
template <>
struct FrameTraits<3> {
    using Frame = PrincipalFrame3;
    using Mat = Eigen::Matrix3d;
};

// Shared eigen-pipeline: from plain-double G, II and their parameter
// derivatives to sorted curvatures, unit frame, coframe, and kd.
template <int N>
typename FrameTraits<N>::Frame assemble_frame(
    const typename FrameTraits<N>::Mat& G, const typename FrameTraits<N>::Mat& II,
    const std::array<typename FrameTraits<N>::Mat, N>& dG,
    const std::array<typename FrameTraits<N>::Mat, N>& dII, bool strict) {
    using Mat = typename FrameTraits<N>::Mat;
    typename FrameTraits<N>::Frame fr{};

    Eigen::SelfAdjointEigenSolver<Mat> gcheck(G);
    if (gcheck.eigenvalues().minCoeff() <= 1e-12 * gcheck.eigenvalues().maxCoeff())
        throw RankDeficient("first fundamental form is numerically singular");

    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(II, G);
    // ascending -> descending
    std::array<int, N> ord;
    for (int i = 0; i < N; ++i) ord[i] = N - 1 - i;

    Mat E; // columns: G-normalized principal directions
    for (int i = 0; i < N; ++i) {
        fr.k[i] = es.eigenvalues()(ord[i]);
        E.col(i) = es.eigenvectors().col(ord[i]);
    }
    for (int i = 0; i < N; ++i)
        for (int j = i + 1; j < N; ++j) {
            const double gap = std::abs(fr.k[i] - fr.k[j]);
            if (gap < kUmbilicEps * (std::abs(fr.k[i]) + std::abs(fr.k[j]) + kCurvatureFloor)) {
                if (strict) throw UmbilicAmbiguity("repeated principal curvature");
                fr.degenerate = true;
            }
        }
    Mat W = E.inverse();
    for (int i = 0; i < N; ++i) {
        fr.g[i] = 1.0; // directions are unit in the surface metric
        for (int a = 0; a < N; ++a) {
            fr.dir[i][a] = E(a, i);
            fr.omega[i][a] = W(i, a);
        }
    }
    // First-order eigenvalue perturbation: dk_i(along u^a) = xi^T (dII - k dG) xi.
    std::array<std::array<double, N>, N> kpar{};
    for (int i = 0; i < N; ++i)
        for (int a = 0; a < N; ++a)
            kpar[i][a] = E.col(i).dot((dII[a] - fr.k[i] * dG[a]) * E.col(i));
    // Frame components: dk^i = kd[i][j] omega^j with omega^j(dir_j) = 1.
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            double s = 0.0;
            for (int a = 0; a < N; ++a) s += kpar[i][a] * fr.dir[j][a];
            fr.kd[i][j] = s;
        }
    return fr;
}

} // namespace

PrincipalFrame2 principal_data(const Immersion2& imm, double u, double v,
                               const PrincipalOptions& opts) {
    const auto r = imm.eval(u, v);
    const auto r1 = axis_shift(r, 0), r2 = axis_shift(r, 1);
    auto ncand = cross(r1, r2);
    const T2 nn2 = dot(ncand, ncand);
    if (nn2.value() <= 1e-24) throw RankDeficient("zero tangent cross product");
    double flip = 1.0;
    if (opts.ref_normal3) {
        const auto& ref = *opts.ref_normal3;
        const double align = ncand[0].value() * ref[0] + ncand[1].value() * ref[1] +
                             ncand[2].value() * ref[2];
        if (align < 0) flip = -1.0;
    }
    Vec<T2, 3> n;
    const T2 inv_len = recip(sqrt(nn2));
    for (int i = 0; i < 3; ++i) n[i] = ncand[i] * inv_len * flip;

    // Second fundamental form with the convention II = <n, d2 r> (shape
    // operator -dn), so curvature is positive toward the normal.
    std::array<Vec<T2, 3>, 3> rij = {axis_shift(r1, 0), axis_shift(r1, 1),
                                     axis_shift(r2, 1)};
    const T2 IIc[3] = {dot(n, rij[0]), dot(n, rij[1]), dot(n, rij[2])};
    const T2 Gc[3] = {dot(r1, r1), dot(r1, r2), dot(r2, r2)};

    Eigen::Matrix2d G, II;
    G << Gc[0].value(), Gc[1].value(), Gc[1].value(), Gc[2].value();
    II << IIc[0].value(), IIc[1].value(), IIc[1].value(), IIc[2].value();
    std::array<Eigen::Matrix2d, 2> dG, dII;
    for (int a = 0; a < 2; ++a) {
        auto d = [&](const T2& t) { return a == 0 ? t.derivative(1, 0) : t.derivative(0, 1); };
        dG[a] << d(Gc[0]), d(Gc[1]), d(Gc[1]), d(Gc[2]);
        dII[a] << d(IIc[0]), d(IIc[1]), d(IIc[1]), d(IIc[2]);
    }
    auto fr = assemble_frame<2>(G, II, dG, dII, opts.strict);
    fr.normal = {n[0].value(), n[1].value(), n[2].value()};
    return fr;
}

PrincipalFrame3 principal_data(const Immersion3& imm, double u, double v, double w,
                               const PrincipalOptions& opts) {
    const auto r = imm.eval(u, v, w);
    const Vec<T3, 4> ra[3] = {axis_shift(r, 0), axis_shift(r, 1), axis_shift(r, 2)};
    auto ncand = cross4(ra[0], ra[1], ra[2]);
    const T3 nn2 = dot(ncand, ncand);
    if (nn2.value() <= 1e-24) throw RankDeficient("degenerate tangent frame");
    double flip = 1.0;
    if (opts.ref_normal4) {
        double align = 0.0;
        for (int i = 0; i < 4; ++i) align += ncand[i].value() * (*opts.ref_normal4)[i];
        if (align < 0) flip = -1.0;
    }
    Vec<T3, 4> n;
    const T3 inv_len = recip(sqrt(nn2));
    for (int i = 0; i < 4; ++i) n[i] = ncand[i] * inv_len * flip;

    Eigen::Matrix3d G, II;
    std::array<Eigen::Matrix3d, 3> dG, dII;
    std::array<std::array<T3, 3>, 3> Gc, IIc;
    for (int a = 0; a < 3; ++a)
        for (int b = a; b < 3; ++b) {
            Gc[a][b] = dot(ra[a], ra[b]);
            IIc[a][b] = dot(n, axis_shift(ra[a], b));
        }
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            const int i = std::min(a, b), j = std::max(a, b);
            G(a, b) = Gc[i][j].value();
            II(a, b) = IIc[i][j].value();
            for (int c = 0; c < 3; ++c) {
                auto d = [&](const T3& t) {
                    return c == 0 ? t.derivative(1, 0, 0)
                                  : (c == 1 ? t.derivative(0, 1, 0) : t.derivative(0, 0, 1));
                };
                dG[c](a, b) = d(Gc[i][j]);
                dII[c](a, b) = d(IIc[i][j]);
            }
        }
    auto fr = assemble_frame<3>(G, II, dG, dII, opts.strict);
    fr.normal = {n[0].value(), n[1].value(), n[2].value(), n[3].value()};
    return fr;
}

ConjugateCoeffs conjugate_coeffs_at(const Immersion2& imm, double u, double v) {
    const auto r = imm.eval(u, v);
    const auto r1 = axis_shift(r, 0), r2 = axis_shift(r, 1);
    const auto r12 = axis_shift(r1, 1);
    Eigen::Matrix2d G;
    G << dot(r1, r1).value(), dot(r1, r2).value(), dot(r1, r2).value(),
        dot(r2, r2).value();
    Eigen::Vector2d rhs(dot(r12, r1).value(), dot(r12, r2).value());
    const Eigen::Vector2d ab = G.ldlt().solve(rhs);
    Vec<double, 3> res;
    double scale2 = 0.0, res2 = 0.0;
    for (int i = 0; i < 3; ++i) {
        res[i] = r12[i].value() - ab(0) * r1[i].value() - ab(1) * r2[i].value();
        res2 += res[i] * res[i];
        scale2 += r1[i].value() * r1[i].value() + r2[i].value() * r2[i].value() +
                  r12[i].value() * r12[i].value();
    }
    return {ab(0), ab(1), std::sqrt(res2 / (scale2 + 1e-300))};
}

ConjugateNet conjugate_net_coefficients(const Immersion2& imm, const Grid2& grid,
                                        double tol) {
    double worst = 0.0;
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i)
            worst = std::max(worst, conjugate_coeffs_at(imm, grid.x(i), grid.y(j)).residual);
    if (worst > tol)
        throw NotConjugate("orthogonal residual " + std::to_string(worst));
    auto imm_copy = imm;
    Field2 fa = Field2::closed([imm_copy](double u, double v) {
        // Jet of the coefficient a: solve the tangential system in Taylor
        // arithmetic so downstream derivative queries stay closed-form.
        const auto r = imm_copy.eval(u, v);
        const auto r1 = axis_shift(r, 0), r2 = axis_shift(r, 1);
        const auto r12 = axis_shift(r1, 1);
        const T2 g11 = dot(r1, r1), g12 = dot(r1, r2), g22 = dot(r2, r2);
        const T2 h1 = dot(r12, r1), h2 = dot(r12, r2);
        const T2 det = g11 * g22 - g12 * g12;
        return (h1 * g22 - h2 * g12) / det;
    });
    Field2 fb = Field2::closed([imm_copy](double u, double v) {
        const auto r = imm_copy.eval(u, v);
        const auto r1 = axis_shift(r, 0), r2 = axis_shift(r, 1);
        const auto r12 = axis_shift(r1, 1);
        const T2 g11 = dot(r1, r1), g12 = dot(r1, r2), g22 = dot(r2, r2);
        const T2 h1 = dot(r12, r1), h2 = dot(r12, r2);
        const T2 det = g11 * g22 - g12 * g12;
        return (h2 * g11 - h1 * g12) / det;
    });
    return {fa, fb, worst};
}

Immersion2 translated(const Immersion2& imm, const Vec<double, 3>& t) {
    auto base = imm.eval;
    return {[base, t](double u, double v) {
        auto r = base(u, v);
        for (int i = 0; i < 3; ++i) r[i] += T2(t[i]);
        return r;
    }};
}

Immersion2 rotated(const Immersion2& imm, const std::array<std::array<double, 3>, 3>& R) {
    auto base = imm.eval;
    return {[base, R](double u, double v) {
        const auto r = base(u, v);
        Vec<T2, 3> out;
        for (int i = 0; i < 3; ++i)
            out[i] = r[0] * R[i][0] + r[1] * R[i][1] + r[2] * R[i][2];
        return out;
    }};
}

Immersion2 dilated(const Immersion2& imm, double s) {
    auto base = imm.eval;
    return {[base, s](double u, double v) {
        auto r = base(u, v);
        for (int i = 0; i < 3; ++i) r[i] = r[i] * s;
        return r;
    }};
}

Immersion2 inverted(const Immersion2& imm, const Vec<double, 3>& c, double radius) {
    auto base = imm.eval;
    const double rho2 = radius * radius;
    return {[base, c, rho2](double u, double v) {
        auto r = base(u, v);
        for (int i = 0; i < 3; ++i) r[i] -= T2(c[i]);
        const T2 d2 = dot(r, r);
        if (d2.value() <= 0.0) throw SingularInversion("surface hits inversion center");
        const T2 scale = rho2 * recip(d2);
        Vec<T2, 3> out;
        for (int i = 0; i < 3; ++i) out[i] = r[i] * scale + T2(c[i]);
        return out;
    }};
}

} // namespace liesphere
