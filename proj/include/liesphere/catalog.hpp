#pragma once
#include <map>
#include <optional>
#include <string>

#include "liesphere/field.hpp"
#include "liesphere/geometry.hpp"

namespace liesphere {

/// A surface presented in curvature-line coordinates: the two coordinate
/// directions are principal everywhere. k1 is bound to the R1 direction and
/// k2 to R2 regardless of magnitude. `normal` (when an immersion is present)
/// is the unit normal the curvatures refer to; shifting along it by `a`
/// multiplies 1 - a*k into the radii (see transform::normal_shift).
struct CurvatureLineChart {
    double r1min = 0, r1max = 1, r2min = 0, r2max = 1;
    bool periodic1 = false, periodic2 = false;
    int n1 = 64, n2 = 64; // default sampling resolution

    Field2 k1, k2, g11, g22;
    std::optional<Immersion2> immersion;
    std::function<Vec<T2, 3>(double, double)> normal;

    Grid2 default_grid() const {
        return Grid2::over(r1min, r1max, r2min, r2max, n1, n2, periodic1, periodic2);
    }
    Grid2 grid(int nx, int ny) const {
        return Grid2::over(r1min, r1max, r2min, r2max, nx, ny, periodic1, periodic2);
    }
};

using ParamMap = std::map<std::string, double>;
using ExprMap = std::map<std::string, std::string>;

/// Closed-form catalog. Catalog ids: plane, sphere (always errors: every
/// point is umbilic), torus_of_revolution, surface_of_revolution,
/// ellipsoid_confocal, dupin_cyclide, graph_patch.
CurvatureLineChart curvature_chart(const std::string& catalog_id, const ParamMap& params,
                                   int n1 = 64, int n2 = 64, const ExprMap& exprs = {});

/// Builds the chart fields k_i = II_ii / g_ii from an immersion whose
/// coordinate net is principal; `orient` flips the normal (+1 keeps the
/// orientation of r_1 x r_2). Verifies the cross term of II on a coarse grid.
CurvatureLineChart chart_from_immersion(const Immersion2& imm, double r1min, double r1max,
                                        double r2min, double r2max, bool per1, bool per2,
                                        int n1, int n2, double orient,
                                        double cross_tol = 1e-7);

/// Degenerate all-umbilic chart (used to express round spheres as chart data
/// for the offset algebra; the invariant operators reject it).
CurvatureLineChart constant_curvature_chart(double k, double g, double extent = 1.0);

/// Third fundamental form coefficients G_ii = (k^i)^2 g_ii.
std::pair<Field2, Field2> third_fundamental_form(const CurvatureLineChart& chart);

/// Largest |II_12| / scale over the grid; zero for genuine curvature-line
/// parametrizations.
double principal_net_residual(const Immersion2& imm, const Grid2& grid);

} // namespace liesphere
