#pragma once
#include <array>
#include <functional>
#include <optional>
#include <string>

#include "liesphere/catalog.hpp"
#include "liesphere/residuals.hpp"

namespace liesphere {

enum class Reduction { Lie, Projective };

/// Density plus nonlocal potentials of the stationary mVN system.
struct MvnFieldSet {
    Field2 U_or_p, V, W;
    Reduction reduction = Reduction::Lie;
    std::string gauge;
};

enum class SurfaceClass { Dupin, DiagonallyCyclidic, Generic };

struct Classification {
    SurfaceClass label;
    double cubic_max, cubic_scale; // zero test: cubic_max < eps * cubic_scale
    double curv_max, curv_scale;
};
Classification classify(const CurvatureLineChart& chart, const Grid2& grid);
std::string class_name(SurfaceClass c);

/// V, W from the density by the second-log-derivative ansatz. The first
/// equation of the mVN system is then an identity; the constraints vanish
/// exactly when the density solves the matching Tzitzeica equation.
MvnFieldSet tzitzeica_ansatz(const Field2& U_or_p, Reduction red);

/// Constraint and equation residuals of a field set.
struct MvnResiduals {
    double equation;
    double constraint;
};
MvnResiduals mvn_residuals(const MvnFieldSet& f, const Grid2& grid);

/// Travelling-wave solution of the Tzitzeica equation: U(x + y) with
/// (ln U)'' = -U^2 + c/U (Lie sign) or +U^2 + c/U (projective), integrated at
/// fixed step 1e-3 with quintic dense output. Derivatives to total order 4.
struct TravellingWave {
    Field2 field;       // U(x + y)
    double umin, umax;  // range over the tabulated interval
};
TravellingWave travelling_wave(double c, double u0, double up0, double smin, double smax,
                               Reduction red = Reduction::Lie);

/// Fourth-order residual agreement between the Calapso equation in (R1, R2)
/// and the stationary DS-II form in (x, y) related by R1 = x+y, R2 = x-y.
/// The DS-II residual carries a constant factor 8 from the change of
/// variables; the returned field has it divided out.
struct CalapsoDs2 {
    GridField2 res_calapso;       // at (R1, R2) nodes
    GridField2 res_ds2_transformed;
    double max_rel_disagreement;
};
CalapsoDs2 calapso_ds2_equivalence(const Field2& u, const Grid2& grid_R);

/// Seeds for the isothermally-asymptotic reconstruction: values of a, b, f
/// at the base corner and the 2-jet of each ambient component.
struct ProjectiveSeeds {
    double a0 = 0, b0 = 0, f0 = 0;
    std::array<std::array<double, 4>, 3> r_jets{}; // per component: r, rx, ry, rxy
};
struct ProjectiveReconstruction {
    Grid2 grid;
    GridField2 a, b, f;
    std::array<GridField2, 3> r;
    double path_residual;  // x-then-y vs y-then-x sweep discrepancy
    double eq47_residual;  // FD residual of the linear system on the output
};
ProjectiveReconstruction reconstruct_projective_surface(const MvnFieldSet& fields,
                                                        const ProjectiveSeeds& seeds,
                                                        const Grid2& grid,
                                                        double tol = 1e-5);

/// Goursat data on the two coordinate lines through the lower-left corner.
struct Seed44 {
    std::function<double(double)> k1_row, k2_row, rho_row; // of R1 at R2 = r2min
    std::function<double(double)> k1_col, k2_col, rho_col; // of R2 at R1 = r1min
};
struct Solve44Result {
    CurvatureLineChart chart; // grid chart with g_ii = e^{2 rho} / d_i k^i
    GridField2 k1, k2, rho;
    std::array<double, 3> residuals; // FD residuals of the three equations
};
Solve44Result solve_44(const Seed44& seed, const Grid2& grid, int fixpoint_iters = 6);

/// Lie sphere density of a diagonally-cyclidic chart plus potentials by
/// quadrature in the requested gauge, and the resulting mVN residual.
struct GaugeSpec {
    enum Kind { ZeroBase, ZeroMean, Supplied } kind = ZeroBase;
    std::function<double(double)> w_base; // W on R1 = r1min (function of R2)
    std::function<double(double)> v_base; // V on R2 = r2min (function of R1)
};
struct DensityCheck {
    GridField2 U, V, W;
    double min_radicand; // min of d1k1 * d2k2 over the grid
    MvnResiduals residuals;
};
DensityCheck lie_density_mvn_check(const CurvatureLineChart& chart, const Grid2& grid,
                                   const GaugeSpec& gauge = {});

/// Auxiliary first-order chain behind the mVN derivation: integrates
/// (k, m, n, A, B, F) from seeds over the grid for a given mVN field set and
/// reports sweep-order discrepancies plus the residuals of the numbered
/// relations of the chain.
struct ChainSeeds {
    double k = 0, A = -1, B = 1, F = 0, m = 0, n = 0;
};
struct AuxChainState {
    Grid2 grid;
    GridField2 k, m, n, A, B, F, G, H, rho;
    double path_residual;
    std::array<double, 5> relation_residuals; // the four coupled relations + closure
    double def_residual;                      // definitional relations for m, n
};
AuxChainState appendix_chain(const MvnFieldSet& fields, const ChainSeeds& seeds,
                             const Grid2& grid, double tol = 1e-4);

} // namespace liesphere
