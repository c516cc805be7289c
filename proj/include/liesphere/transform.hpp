#pragma once
#include <random>
#include <string>
#include <vector>

#include "liesphere/catalog.hpp"
#include "liesphere/invariants.hpp"

namespace liesphere {

/// Generator of the Lie sphere group action on surface data: conformal
/// transformations of the ambient space plus offsets along the normal.
struct LieSphereElement {
    enum Kind { Translation, Rotation, Dilation, Inversion, NormalShift } kind;
    Vec<double, 3> vec{0, 0, 0};                  // translation / inversion center
    std::array<std::array<double, 3>, 3> mat{};   // rotation
    double scalar = 1.0;                          // dilation factor / inversion radius / shift

    static LieSphereElement translation(const Vec<double, 3>& t);
    static LieSphereElement rotation(const std::array<std::array<double, 3>, 3>& R);
    static LieSphereElement dilation(double s);
    static LieSphereElement inversion(const Vec<double, 3>& center, double radius);
    static LieSphereElement normal_shift(double a);
    std::string describe() const;
};

/// Conformal image of an immersed chart. Curvature lines persist, so the
/// parametrization stays a curvature-line chart; curvatures and metric are
/// recomputed from the transformed immersion.
CurvatureLineChart apply_conformal(const CurvatureLineChart& chart,
                                   const LieSphereElement& g);

/// Offset chart: k -> k/(1 - a k), g -> (1 - a k)^2 g; the backing immersion
/// moves along the chart normal. Fails when 1 - a k vanishes (focal set).
CurvatureLineChart normal_shift(const CurvatureLineChart& chart, double a);

/// Applies an arbitrary element.
CurvatureLineChart apply(const CurvatureLineChart& chart, const LieSphereElement& g);

enum class InvariantTarget {
    Quad11,        // symmetric form coefficient
    CubicClass12,  // conformal class of the cubic form
    WebCurv43,     // curvature of the web connection
    MobiusForms,   // Moebius 1-form coefficients
    MobiusQuad,
    LaguerreForms, // Laguerre 1-form coefficients
    LaguerreQuad,
    WillmoreFunctional,
    Lie13Functional,
};
std::string target_name(InvariantTarget t);

struct TargetReport {
    InvariantTarget target;
    double max_rel_deviation;
};
struct ElementReport {
    LieSphereElement element;
    std::vector<TargetReport> targets;
};
struct InvarianceReport {
    std::vector<ElementReport> elements;
    double max_rel_deviation = 0.0;
};

/// Transforms the chart by each element, recomputes the requested invariants
/// and compares them as tensors on the shared parameter grid.
InvarianceReport invariance_report(const CurvatureLineChart& chart,
                                   const std::vector<LieSphereElement>& elements,
                                   const std::vector<InvariantTarget>& targets,
                                   const Grid2& grid);

/// Seeded random elements respecting the chart's preconditions: inversion
/// centers at 2-5 surface diameters from the barycenter, shift distances
/// within half the smallest focal distance.
std::vector<LieSphereElement> random_elements(const CurvatureLineChart& chart, int count,
                                              unsigned seed, bool conformal_only = false,
                                              bool shifts_only = false);

} // namespace liesphere
