#pragma once

#include <stdexcept>
#include <string>

namespace zkw {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define ZKW_ERROR_TYPE(NAME)                                    \
  struct NAME : Error {                                         \
    explicit NAME(const std::string& msg = #NAME) : Error(msg) {} \
  }

ZKW_ERROR_TYPE(TruncationExceeded);      // enumeration left the lattice search box
ZKW_ERROR_TYPE(ScaleMismatch);           // tiles at different dyadic scales
ZKW_ERROR_TYPE(LatticeMismatch);         // operands on different lattices
ZKW_ERROR_TYPE(HypothesisViolated);      // generated instance fails a precondition
ZKW_ERROR_TYPE(GridTooCoarse);           // quadrature grid cannot resolve the thickness
ZKW_ERROR_TYPE(DegenerateTransversality);// sampled surface triple is (near-)tangent
ZKW_ERROR_TYPE(StepTooLarge);            // dt above the stability bound
ZKW_ERROR_TYPE(NotRealData);             // Hermitian symmetry required but absent
ZKW_ERROR_TYPE(ConfigInvalid);           // config fails schema validation
ZKW_ERROR_TYPE(IoError);                 // file read/write failure
ZKW_ERROR_TYPE(ManifestMismatch);        // manifests not comparable

#undef ZKW_ERROR_TYPE

}  // namespace zkw
