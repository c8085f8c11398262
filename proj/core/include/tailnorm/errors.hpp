#pragma once

#include <stdexcept>
#include <string>

namespace tailnorm {

// Thrown when caller-supplied data violates a precondition (bad parameters,
// malformed descriptors, grids out of range).
class input_error : public std::invalid_argument {
public:
    explicit input_error(const std::string& what) : std::invalid_argument(what) {}
};

// Thrown when a quantity is provably divergent for the requested argument,
// e.g. a moment of order p at or beyond the family's critical exponent.
// Divergence of a supremum under refinement is NOT an error; it is reported
// through the `diverged` flag of the estimate types.
class divergence_error : public std::runtime_error {
public:
    divergence_error(const std::string& what, double critical)
        : std::runtime_error(what), critical_(critical) {}
    // Critical parameter value (exponent or argument) at which divergence sets in.
    double critical() const { return critical_; }

private:
    double critical_;
};

// Thrown when a numeric routine cannot reach its tolerance target.  Carries
// the partial value so callers can report it in diagnostics.
class convergence_error : public std::runtime_error {
public:
    convergence_error(const std::string& what, double partial)
        : std::runtime_error(what), partial_(partial) {}
    double partial() const { return partial_; }

private:
    double partial_;
};

// Thrown when a derived object fails its structural checks at construction
// (e.g. a candidate generating function that is not convex on samples).
class construction_error : public std::runtime_error {
public:
    explicit construction_error(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when an operation is well defined only for a sub-family of inputs
// (e.g. growth functionals requiring an unbounded exponent range).
class not_applicable_error : public std::runtime_error {
public:
    explicit not_applicable_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace tailnorm
