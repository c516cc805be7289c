#pragma once
#include <stdexcept>
#include <string>

namespace liesphere {

// Error taxonomy used across the library. Each condition that a caller can
// act on gets its own type; everything else is a plain runtime_error.
#define LIESPHERE_ERROR(Name)                                  \
    struct Name : std::runtime_error {                         \
        explicit Name(const std::string& what)                 \
            : std::runtime_error(std::string(#Name ": ") + what) {} \
    }

LIESPHERE_ERROR(RankDeficient);
LIESPHERE_ERROR(UmbilicAmbiguity);
LIESPHERE_ERROR(UmbilicPoint);
LIESPHERE_ERROR(UmbilicInDomain);
LIESPHERE_ERROR(UnknownCatalogId);
LIESPHERE_ERROR(NotConjugate);
LIESPHERE_ERROR(DegenerateInvariant);
LIESPHERE_ERROR(ZeroCurvature);
LIESPHERE_ERROR(NonIntegrable);
LIESPHERE_ERROR(RepeatedCurvature);
LIESPHERE_ERROR(NormalizationFailure);
LIESPHERE_ERROR(SingularInversion);
LIESPHERE_ERROR(FocalSingularity);
LIESPHERE_ERROR(MissingField);
LIESPHERE_ERROR(InsufficientDerivativeOrder);
LIESPHERE_ERROR(ZeroDivision);
LIESPHERE_ERROR(NonPositiveDensity);
LIESPHERE_ERROR(BlowUp);
LIESPHERE_ERROR(IncompatibleData);
LIESPHERE_ERROR(GenericityLoss);
LIESPHERE_ERROR(StepFailure);
LIESPHERE_ERROR(NegativeRadicand);
LIESPHERE_ERROR(SingularTransform);
LIESPHERE_ERROR(RepeatedVelocity);
LIESPHERE_ERROR(RepeatedEigenvalue);
LIESPHERE_ERROR(SolvabilityFailure);
LIESPHERE_ERROR(CFLViolation);
LIESPHERE_ERROR(SchemaViolation);

#undef LIESPHERE_ERROR

} // namespace liesphere
