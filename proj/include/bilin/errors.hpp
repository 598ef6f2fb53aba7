#pragma once

#include <stdexcept>
#include <string>

namespace bilin {

/// Base class for every error this library throws.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define BILIN_DEFINE_ERROR(Name)                                       \
    class Name : public Error {                                        \
    public:                                                            \
        explicit Name(const std::string& what) : Error(what) {}        \
    }

BILIN_DEFINE_ERROR(DomainError);        // singular structure, invalid parameter
BILIN_DEFINE_ERROR(EigenvalueOnCut);    // matrix log: eigenvalue on (-inf, 0]
BILIN_DEFINE_ERROR(OutOfDomain);        // t beyond the geodesic existence time
BILIN_DEFINE_ERROR(BlowupDetected);     // ODE state exceeded the overflow guard
BILIN_DEFINE_ERROR(NotInImage);         // log target outside the exponential's image
BILIN_DEFINE_ERROR(MeshMismatch);       // fields living on different meshes
BILIN_DEFINE_ERROR(ParseError);         // malformed field file
BILIN_DEFINE_ERROR(ShapeError);         // inconsistent dimensions
BILIN_DEFINE_ERROR(ValidationError);    // invariant violated on construction/load
BILIN_DEFINE_ERROR(KindMismatch);       // field fails a symmetry-kind precondition
BILIN_DEFINE_ERROR(NotSymmetric);
BILIN_DEFINE_ERROR(NotSkew);
BILIN_DEFINE_ERROR(UnsupportedDimension);
BILIN_DEFINE_ERROR(NotRiemannian);      // metric field not symmetric positive definite
BILIN_DEFINE_ERROR(NotInD2);
BILIN_DEFINE_ERROR(NotTangentToPV);     // im xi ⊂ V ⊂ ker xi fails
BILIN_DEFINE_ERROR(InvalidP);           // not an almost product structure over V
BILIN_DEFINE_ERROR(InvalidTriple);      // split triple fails positivity/symmetry

#undef BILIN_DEFINE_ERROR

}  // namespace bilin
