#pragma once

#include <cstddef>
#include <vector>

#include "talenti/errors.hpp"

namespace talenti {

// Tridiagonal system with rows lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1].
// lower[0] and upper[n-1] are ignored.
struct Tridiagonal {
    std::vector<double> lower, diag, upper;

    std::size_t size() const { return diag.size(); }
};

// Thomas elimination without pivoting. Valid for the diagonally dominant
// M-matrices produced by the implicit steps here; when every off-diagonal
// entry is <= 0 and the right side is nonnegative, every arithmetic step
// adds nonnegative quantities, so the solution is nonnegative exactly in
// floating point, not just up to rounding.
inline std::vector<double> thomas_solve(const Tridiagonal& m, const std::vector<double>& rhs) {
    std::size_t n = m.size();
    if (rhs.size() != n || m.lower.size() != n || m.upper.size() != n)
        throw DomainError("thomas_solve: size mismatch");
    std::vector<double> c(n), d(n), x(n);
    double beta = m.diag[0];
    if (beta == 0.0) throw NumericalError("thomas_solve: zero pivot at row 0");
    c[0] = m.upper[0] / beta;
    d[0] = rhs[0] / beta;
    for (std::size_t i = 1; i < n; ++i) {
        beta = m.diag[i] - m.lower[i] * c[i - 1];
        if (beta == 0.0) throw NumericalError("thomas_solve: zero pivot at row " + std::to_string(i));
        c[i] = m.upper[i] / beta;
        d[i] = (rhs[i] - m.lower[i] * d[i - 1]) / beta;
    }
    x[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
    return x;
}

}
