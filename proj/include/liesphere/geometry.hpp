#pragma once
#include <array>
#include <functional>
#include <optional>

#include "liesphere/field.hpp"
#include "liesphere/taylor.hpp"

namespace liesphere {

/// Parametrized surface patch in E^3 with closed-form derivative access
/// (the evaluator returns full Taylor jets of the position vector).
struct Immersion2 {
    std::function<Vec<T2, 3>(double, double)> eval;
    /// Plain-double evaluation (used by independent finite-difference oracles).
    Vec<double, 3> point(double u, double v) const {
        const auto j = eval(u, v);
        return {j[0].value(), j[1].value(), j[2].value()};
    }
};

/// Hypersurface patch M^3 in E^4.
struct Immersion3 {
    std::function<Vec<T3, 4>(double, double, double)> eval;
    Vec<double, 4> point(double u, double v, double w) const {
        const auto j = eval(u, v, w);
        return {j[0].value(), j[1].value(), j[2].value(), j[3].value()};
    }
};

/// Pointwise principal data of a surface. Curvature sign convention: the
/// shape operator is -dn composed with dr^{-1}; the returned `normal` is the
/// one actually used, so k > 0 means the surface bends toward it (a sphere
/// carries k = 1/rho with the normal pointing at the center).
struct PrincipalFrame2 {
    std::array<double, 2> k;                    // descending
    std::array<std::array<double, 2>, 2> dir;   // unit principal directions (param coords)
    std::array<std::array<double, 2>, 2> omega; // dual coframe rows
    std::array<double, 2> g;                    // first fundamental form on dir (== 1)
    std::array<std::array<double, 2>, 2> kd;    // kd[i][j]: dk^i = kd[i][j] omega^j
    Vec<double, 3> normal;
    bool degenerate = false;
};

struct PrincipalFrame3 {
    std::array<double, 3> k;
    std::array<std::array<double, 3>, 3> dir;
    std::array<std::array<double, 3>, 3> omega;
    std::array<double, 3> g;
    std::array<std::array<double, 3>, 3> kd;
    Vec<double, 4> normal;
    bool degenerate = false;
};

struct PrincipalOptions {
    bool strict = false;               // degeneracy becomes an error
    std::optional<Vec<double, 3>> ref_normal3;
    std::optional<Vec<double, 4>> ref_normal4;
};

PrincipalFrame2 principal_data(const Immersion2& imm, double u, double v,
                               const PrincipalOptions& opts = {});
PrincipalFrame3 principal_data(const Immersion3& imm, double u, double v, double w,
                               const PrincipalOptions& opts = {});

/// Coefficients a, b with r_12 = a r_1 + b r_2 (least squares on the tangent
/// span), plus the orthogonal residual relative to the local scale.
struct ConjugateCoeffs {
    double a, b, residual;
};
ConjugateCoeffs conjugate_coeffs_at(const Immersion2& imm, double u, double v);

struct ConjugateNet {
    Field2 a, b;
    double max_residual;
};
/// Checks conjugacy of the coordinate net over a sample grid; throws
/// NotConjugate when the orthogonal residual exceeds `tol`.
ConjugateNet conjugate_net_coefficients(const Immersion2& imm, const Grid2& grid,
                                        double tol = 1e-8);

/// Rigid motions and similarities composed onto an immersion evaluator.
Immersion2 translated(const Immersion2& imm, const Vec<double, 3>& t);
Immersion2 rotated(const Immersion2& imm, const std::array<std::array<double, 3>, 3>& R);
Immersion2 dilated(const Immersion2& imm, double s);
Immersion2 inverted(const Immersion2& imm, const Vec<double, 3>& center, double radius);

} // namespace liesphere
