#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "fuelctl/errors.hpp"

namespace fuelctl {

/// Thomas algorithm for lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i].
/// lower[0] and upper[n-1] are ignored. No pivoting: callers pass
/// diagonally dominant systems. Throws SingularSystem on a zero or
/// non-finite pivot.
inline std::vector<double> solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                                             std::span<const double> upper, std::span<const double> rhs) {
    const std::size_t n = diag.size();
    std::vector<double> c(n, 0.0);
    std::vector<double> x(n, 0.0);
    if (n == 0) return x;

    double pivot = diag[0];
    if (pivot == 0.0 || !std::isfinite(pivot)) throw SingularSystem("zero pivot in row 0");
    c[0] = n > 1 ? upper[0] / pivot : 0.0;
    x[0] = rhs[0] / pivot;
    for (std::size_t i = 1; i < n; ++i) {
        pivot = diag[i] - lower[i] * c[i - 1];
        if (pivot == 0.0 || !std::isfinite(pivot)) throw SingularSystem("zero pivot in tridiagonal elimination");
        c[i] = i + 1 < n ? upper[i] / pivot : 0.0;
        x[i] = (rhs[i] - lower[i] * x[i - 1]) / pivot;
    }
    for (std::size_t i = n - 1; i-- > 0;) x[i] -= c[i] * x[i + 1];
    return x;
}

}  // namespace fuelctl
