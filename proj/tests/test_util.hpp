#pragma once

#include <cmath>
#include <doctest.h>

// rel(a, b) <= tol style checks read better than Approx chains in the
// numeric suites, and behave sanely around zero.
inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(1e-300, std::abs(want));
}

#define CHECK_REL(got, want, tol) CHECK(rel_err((got), (want)) <= (tol))
#define REQUIRE_REL(got, want, tol) REQUIRE(rel_err((got), (want)) <= (tol))
