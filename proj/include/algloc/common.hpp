#ifndef ALGLOC_COMMON_HPP
#define ALGLOC_COMMON_HPP

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace algloc {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Expression-language syntax error; `position` is a byte offset into the source.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t position)
        : Error(what + " (at position " + std::to_string(position) + ")"), position(position) {}
    std::size_t position;
};

// Unknown symbol, unbound parameter, or other lookup failure.
class SymbolError : public Error {
public:
    using Error::Error;
};

// Division by zero, sqrt of a negative number, non-finite result.
class EvalError : public Error {
public:
    using Error::Error;
};

// Degree out of range for a graded operation.
class DegreeError : public Error {
public:
    using Error::Error;
};

// Model validation failure (axioms, fixed points, dimensions).
class ValidationError : public Error {
public:
    using Error::Error;
};

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Absolute-plus-relative tolerance: residuals pass when |r| <= atol + rtol*|reference|.
struct Tolerance {
    double atol = 1e-9;
    double rtol = 0.0;

    double bound(double reference = 0.0) const { return atol + rtol * std::abs(reference); }
    bool accepts(double residual, double reference = 0.0) const {
        return std::abs(residual) <= bound(reference);
    }
};

// Two-sided comparison used for LHS/RHS equality checks: relative when the
// values are away from zero, absolute otherwise.
inline bool close_pair(double a, double b, double rtol, double atol) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return std::abs(a - b) <= std::max(atol, rtol * scale);
}

}  // namespace algloc

#endif
