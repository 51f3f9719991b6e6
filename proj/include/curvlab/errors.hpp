#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace curvlab {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidArgument : Error { using Error::Error; };
struct SpecMismatch : Error { using Error::Error; };
struct ZeroClass : Error { using Error::Error; };
struct NonZeroMean : Error { using Error::Error; };
struct InvalidLambda : Error { using Error::Error; };
struct QuadratureSingular : Error { using Error::Error; };
struct SweepInconclusive : Error { using Error::Error; };
struct HypothesisViolation : Error { using Error::Error; };

struct TracePoint {
    double lambda = 0.0;
    int iterations = 0;
    double residual = 0.0;
    double max_u = 0.0;
};

// Thrown when continuation stalls; carries the path taken so far.
struct NonConvergence : Error {
    NonConvergence(const std::string& what, std::vector<TracePoint> trace)
        : Error(what), trace(std::move(trace)) {}
    std::vector<TracePoint> trace;
};

}  // namespace curvlab
