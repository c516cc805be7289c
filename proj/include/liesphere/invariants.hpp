#pragma once
#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "liesphere/catalog.hpp"
#include "liesphere/field.hpp"
#include "liesphere/geometry.hpp"

namespace liesphere {

/// Pointwise values of the chart invariants. omega1/omega2 are the
/// coefficients of the Lie-invariant 1-forms in dR1, dR2; quad is the
/// coefficient of the dR1 dR2 symmetric form; (cubic1, cubic3) the dR1^3 and
/// dR2^3 cubic coefficients; conn/Omega the web connection and its
/// primitive; curv the dR1^dR2 coefficient of the connection curvature.
struct InvariantPoint {
    double k1, k2, g11, g22;
    double quad, cubic1, cubic3;
    double omega1 = 0, omega2 = 0;
    double conn1 = 0, conn2 = 0, Omega1 = 0, Omega2 = 0;
    double curv = 0, dOmega = 0;
    double curv_scale = 0; // |d1 Omega_2| + |d2 Omega_1|, the size curv cancels against
    bool generic = false;  // both d_i k^i away from zero here
};

/// Full jets of the four chart fields at a point (order 4 total for grid
/// charts via finite differences, exact for closed-form charts).
struct ChartJets {
    T2 k1, k2, g11, g22;
};
ChartJets chart_jets(const CurvatureLineChart& chart, double u, double v);

InvariantPoint invariants_at(const CurvatureLineChart& chart, double u, double v);

/// Sampled invariant fields over a grid.
struct Forms2D {
    Grid2 grid;
    GridField2 quad, cubic1, cubic3;
    GridField2 omega1, omega2;
    GridField2 conn1, conn2, Omega1, Omega2, curv, dOmega;
    double genericity_fraction = 0; // share of nodes with d_i k^i resolvable
    double curv_scale = 0;          // natural magnitude the curvature cancels against
};
Forms2D lie_forms(const CurvatureLineChart& chart, const Grid2& grid);

/// The two invariant 1-form coefficient fields alone; errors out when a
/// coordinate derivative of its own curvature vanishes on more than isolated
/// points (Dupin-type degeneracy).
std::pair<GridField2, GridField2> lie_one_forms(const CurvatureLineChart& chart,
                                                const Grid2& grid);

struct WebConnection {
    GridField2 conn1, conn2, Omega1, Omega2, curv, dOmega;
    double identity_residual; // max |domega - dOmega/3|
};
WebConnection web_connection(const CurvatureLineChart& chart, const Grid2& grid);

struct MobiusLaguerreForms {
    GridField2 mobius1, mobius2;     // 1-form coefficients
    GridField2 mquad1, mquad2;       // quadratic form coefficients
    GridField2 laguerre1, laguerre2; // 1-form coefficients (radii)
    GridField2 lquad1, lquad2;       // quadratic form coefficients
};
MobiusLaguerreForms mobius_laguerre_forms(const CurvatureLineChart& chart,
                                          const Grid2& grid);

enum class Functional { Lie13, Ab31, Willmore, Laguerre };
/// Integrated invariant densities. For Ab31 the returned pair holds the value
/// computed from (a, b) and the cross-check through the rotation
/// coefficients; for the others both entries coincide.
std::pair<double, double> functionals(const CurvatureLineChart& chart, Functional which,
                                      const Grid2& grid);

/// Conformal representative of a cubic coefficient pair: leading
/// non-vanishing coefficient scaled to +1.
std::array<double, 2> cubic_representative(double c1, double c3, double scale);

// ---- hypersurfaces M^3 in E^4 ---------------------------------------------

/// A field of principal frames over a 3D parameter box, either derived from
/// an immersion or synthetic.
struct FrameField3 {
    std::function<PrincipalFrame3(const std::array<double, 3>&)> at;
    double fd_step = 1e-3; // step for structure-constant differentiation
};
FrameField3 frame_field(const Immersion3& imm);

struct HyperInvariants {
    std::array<double, 3> k;
    std::array<std::array<double, 3>, 3> quad; // zero diagonal
    std::array<double, 3> cubic;
    std::array<double, 3> covector;  // coefficient on omega^i, index triples (i;j,l)
    std::array<double, 3> conf_quad; // coefficients of (the n=3) conformal class
    std::array<double, 3> omega_n;   // 1-form coefficients
    std::array<double, 3> domega_n;  // d of it, on omega^j^omega^k, (j,k) = (2,3),(3,1),(1,2)
    double density_52;               // volume density; equals the covector product
    std::array<double, 3> structure_c; // c^1_23, c^2_31, c^3_12
    bool holonomic = false;
    std::optional<std::array<double, 3>> normalization; // coframe scales, when real
    std::vector<double> cross_ratios; // empty for n = 3
};
HyperInvariants hypersurface_invariants(const FrameField3& frames,
                                        const std::array<double, 3>& point);

} // namespace liesphere
