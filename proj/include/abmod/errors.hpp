#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace abmod {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed input text (module files, series strings). CLI exit code 2.
struct ParseError : Error {
    using Error::Error;
};

/// A precondition on the mathematical data failed. CLI exit code 3.
struct PreconditionError : Error {
    using Error::Error;
};

/// Known truncation order is too small to decide the question.
/// `have` is the order available, `need` the smallest sufficient order
/// when the caller can estimate one (0 = unknown). CLI exit code 4.
struct InsufficientPrecision : Error {
    std::size_t have = 0;
    std::size_t need = 0;
    InsufficientPrecision(const std::string& msg, std::size_t have_, std::size_t need_ = 0)
        : Error(msg), have(have_), need(need_) {}
};

struct NotAUnit : PreconditionError { using PreconditionError::PreconditionError; };
struct RankDeficient : PreconditionError { using PreconditionError::PreconditionError; };
struct NotASublattice : PreconditionError { using PreconditionError::PreconditionError; };
struct ShapeMismatch : PreconditionError { using PreconditionError::PreconditionError; };
struct BadParameter : PreconditionError { using PreconditionError::PreconditionError; };
struct NotInvertible : PreconditionError { using PreconditionError::PreconditionError; };
struct NotSimplePole : PreconditionError { using PreconditionError::PreconditionError; };
struct NonSplitSpectrum : PreconditionError { using PreconditionError::PreconditionError; };
struct NotPrimitive : PreconditionError { using PreconditionError::PreconditionError; };
struct NotEigen : PreconditionError { using PreconditionError::PreconditionError; };
struct NotStable : PreconditionError { using PreconditionError::PreconditionError; };
struct NotRegular : PreconditionError { using PreconditionError::PreconditionError; };
struct CrossCheckFailed : Error { using Error::Error; };
struct NotMinimalExponent : PreconditionError { using PreconditionError::PreconditionError; };
struct NotStabilized : PreconditionError { using PreconditionError::PreconditionError; };
struct BoundNotInteger : PreconditionError { using PreconditionError::PreconditionError; };
struct LiftNotUnique : Error { using Error::Error; };
struct LiftNotFound : Error { using Error::Error; };

} // namespace abmod
