#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace invpde {

// Base class for all engine errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// expr
struct ZeroDenominator : Error { using Error::Error; };
struct NearSingular : Error { using Error::Error; };

// series
struct NonUnit : Error { using Error::Error; };
struct BasepointMismatch : Error { using Error::Error; };
struct NotInvertible : Error { using Error::Error; };

// jet
struct OrderOverflow : Error { using Error::Error; };
struct NotSymmetric : Error { using Error::Error; };

// euclidean / conformal group actions
struct NonAdmissible : Error { using Error::Error; };
struct ChartBoundary : Error { using Error::Error; };
struct NotOnCone : Error { using Error::Error; };
struct NotRotation : Error { using Error::Error; };
struct NoInvariants : Error { using Error::Error; };
struct NotHomogeneous : Error { using Error::Error; };
struct EmptyEquation : Error { using Error::Error; };

// harness
struct OutOfDomain : Error { using Error::Error; };

// parsing
struct ParseError : Error {
    std::size_t position;
    ParseError(const std::string& msg, std::size_t pos) : Error(msg), position(pos) {}
};

}  // namespace invpde
