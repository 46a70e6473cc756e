#pragma once

#include <stdexcept>
#include <string>

namespace conslaw {

/// Error categories, used by the CLI to pick an exit code.
enum class ErrorCode {
    parse,            // unreadable input, undeclared names, bad grammar
    validation,       // well-formed input violating a structural requirement
    empty_result,     // a solve returned nothing
    inapplicable,     // a flux method cannot run on this input
    verification,     // a produced object failed its own exactness check
    internal,         // invariant breach inside the library
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

struct ParseError : Error {
    explicit ParseError(const std::string& w) : Error(ErrorCode::parse, w) {}
};

struct ValidationError : Error {
    explicit ValidationError(const std::string& w) : Error(ErrorCode::validation, w) {}
};

struct EmptyResultError : Error {
    explicit EmptyResultError(const std::string& w) : Error(ErrorCode::empty_result, w) {}
};

/// The formal parameter integral has a term with a nonpositive power, so
/// integrating from 0 does not converge.
struct DivergentIntegralError : Error {
    explicit DivergentIntegralError(const std::string& w) : Error(ErrorCode::inapplicable, w) {}
};

/// An undetermined function atom blocks a closed-form construction.
struct ArbitraryFunctionError : Error {
    explicit ArbitraryFunctionError(const std::string& w) : Error(ErrorCode::inapplicable, w) {}
};

/// The integrand has a part independent of the dependent variables, so the
/// radial homotopy has no valid base point at zero.
struct NonvanishingAtZeroError : Error {
    explicit NonvanishingAtZeroError(const std::string& w) : Error(ErrorCode::inapplicable, w) {}
};

/// An expression is not homogeneous under the requested scaling action.
struct NonHomogeneousError : Error {
    explicit NonHomogeneousError(const std::string& w) : Error(ErrorCode::inapplicable, w) {}
};

/// No flux of the requested shape exists; the ansatz must be enlarged.
struct NoSolutionError : Error {
    explicit NoSolutionError(const std::string& w) : Error(ErrorCode::inapplicable, w) {}
};

struct ReductionLimitError : Error {
    explicit ReductionLimitError(const std::string& w) : Error(ErrorCode::internal, w) {}
};

struct VerificationError : Error {
    explicit VerificationError(const std::string& w) : Error(ErrorCode::verification, w) {}
};

struct InternalError : Error {
    explicit InternalError(const std::string& w) : Error(ErrorCode::internal, w) {}
};

}  // namespace conslaw
