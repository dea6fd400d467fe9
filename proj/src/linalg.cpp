#include "crw/linalg.hpp"

#include <cmath>
#include <cstddef>
#include <sstream>

#include "crw/errors.hpp"

namespace crw::linalg {

std::vector<double> solve(std::vector<double> a, std::vector<double> rhs,
                          double pivot_tol) {
  const std::size_t n = rhs.size();
  if (a.size() != n * n) fail(ErrorCode::Internal, "linalg::solve: shape mismatch");
  if (n == 0) return {};

  double scale = 0.0;
  for (double v : a) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) scale = 1.0;

  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t best = col;
    double best_abs = std::abs(a[perm[col] * n + col]);
    for (std::size_t row = col + 1; row < n; ++row) {
      const double v = std::abs(a[perm[row] * n + col]);
      if (v > best_abs) {
        best = row;
        best_abs = v;
      }
    }
    if (best_abs <= pivot_tol * scale) {
      std::ostringstream msg;
      msg << "singular linear system (pivot " << best_abs << " at column " << col
          << ", n=" << n << ")";
      fail(ErrorCode::Singular, msg.str());
    }
    std::swap(perm[col], perm[best]);

    const std::size_t prow = perm[col];
    const double pivot = a[prow * n + col];
    for (std::size_t row = col + 1; row < n; ++row) {
      const std::size_t r = perm[row];
      const double factor = a[r * n + col] / pivot;
      if (factor == 0.0) continue;
      a[r * n + col] = 0.0;
      for (std::size_t k = col + 1; k < n; ++k) a[r * n + k] -= factor * a[prow * n + k];
      rhs[r] -= factor * rhs[prow];
    }
  }

  std::vector<double> x(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    const std::size_t r = perm[i];
    double acc = rhs[r];
    for (std::size_t k = i + 1; k < n; ++k) acc -= a[r * n + k] * x[k];
    x[i] = acc / a[r * n + i];
  }
  return x;
}

double residual_inf(const std::vector<double>& a, const std::vector<double>& x,
                    const std::vector<double>& rhs) {
  const std::size_t n = x.size();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double acc = -rhs[i];
    for (std::size_t k = 0; k < n; ++k) acc += a[i * n + k] * x[k];
    worst = std::max(worst, std::abs(acc));
  }
  return worst;
}

}  // namespace crw::linalg
