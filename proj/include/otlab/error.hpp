#pragma once

#include <stdexcept>
#include <string>

namespace otlab {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidParameter : Error { using Error::Error; };
struct OutsideDomain : Error { using Error::Error; };
struct NotOnBoundary : Error { using Error::Error; };
struct DegeneratePolygon : Error { using Error::Error; };
struct UnboundedSection : Error { using Error::Error; };
struct SolverFailure : Error { using Error::Error; };
struct UnderSampled : Error { using Error::Error; };
struct IncompatibleRanges : Error { using Error::Error; };
struct DegenerateDirection : Error { using Error::Error; };
struct NotApplicable : Error { using Error::Error; };

// Config parse/validation error; `path` is the offending field, e.g. "solver.tol".
struct SchemaError : Error {
    std::string path;
    SchemaError(std::string field, const std::string& msg)
        : Error(field + ": " + msg), path(std::move(field)) {}
};

}  // namespace otlab
