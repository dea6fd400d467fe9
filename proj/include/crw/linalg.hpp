#pragma once

#include <cstddef>
#include <vector>

namespace crw::linalg {

// Solves the dense row-major n x n system a * x = rhs by Gaussian elimination
// with partial pivoting. The systems in this library are tiny (a few dozen
// unknowns at most), so a dense direct solve is the robust choice.
// Throws Error(Singular) when the best available pivot falls below
// pivot_tol relative to the matrix scale.
std::vector<double> solve(std::vector<double> a, std::vector<double> rhs,
                          double pivot_tol = 1e-12);

// Max-norm residual |a*x - rhs| of a candidate solution.
double residual_inf(const std::vector<double>& a, const std::vector<double>& x,
                    const std::vector<double>& rhs);

}  // namespace crw::linalg
