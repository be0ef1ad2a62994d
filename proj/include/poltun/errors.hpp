#pragma once

#include <stdexcept>

namespace poltun {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// bad or missing physical parameters (non-positive frequencies, empty
// coupling list, out-of-range arguments)
struct InvalidParameter : Error { using Error::Error; };

// collective stability N<lambda^4> < w0^2 wc^2 violated; w- would be zero
// or imaginary and there is no metastable configuration to tunnel out of
struct UnstableSystem : Error { using Error::Error; };

// chi_P evaluated where its denominator is non-positive
struct DivergentResponse : Error { using Error::Error; };

// explicit Matsubara cutoff too small for the requested accuracy
struct TruncationNotConverged : Error { using Error::Error; };

// quadrature grid fails the grading/coverage contract or the Richardson
// error estimate exceeds the tolerance
struct GridTooCoarse : Error { using Error::Error; };

// gradient root-finding on the regularized potential did not converge
struct StationaryPointNotFound : Error { using Error::Error; };

// cumulant formulas requested outside their regime N<g^2> < w0 wc
struct RWAViolation : Error { using Error::Error; };

} // namespace poltun
