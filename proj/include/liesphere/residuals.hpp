#pragma once
#include <map>
#include <string>
#include <vector>

#include "liesphere/field.hpp"

namespace liesphere {

/// Pointwise residual of a tagged equation or system evaluated over a grid.
/// Systems report the max over component residuals per point; equations with
/// nonlocal potentials additionally return their constraint residuals.
struct ResidualReport {
    std::string eq;
    GridField2 combined;                  // max |component| pointwise
    std::vector<GridField2> components;   // individual equations
    std::vector<GridField2> constraints;  // potential constraints, when present
    double max_abs = 0;
    double max_constraint = 0;
};

using FieldMap = std::map<std::string, Field2>;

/// Equation tags: eq4.4, eq4.5, calapso (alias eq4.6), ds2_stationary,
/// mvn_lie, mvn_projective (alias eq4.13), tzitzeica_lie,
/// tzitzeica_projective, liouville, eq4.10.
/// Required fields per tag:
///   eq4.4 / eq4.5: k1, k2, rho
///   calapso / ds2_stationary: u
///   mvn_lie: U, V, W          mvn_projective: p, V, W
///   tzitzeica_*: U or p (param c)       liouville: p
///   eq4.10: p, a, b
ResidualReport residual(const std::string& eq, const FieldMap& fields, const Grid2& grid,
                        const std::map<std::string, double>& params = {});

std::vector<std::string> residual_tags();

} // namespace liesphere
