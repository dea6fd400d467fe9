#pragma once

#include <vector>

#include "crw/chains.hpp"
#include "crw/ruin.hpp"

namespace crw::martingale {

// One-step conditional moments of the increment, as polynomials in the
// previous increment s:
//   E(X_n  | X_{n-1}=s) = intercept + slope*s + quad*s^2
//   E(X_n^2| X_{n-1}=s) = sq_intercept + sq_slope*s + sq_quad*s^2
// Two-state chains have quad = 0 and (sq_intercept, sq_slope, sq_quad) =
// (1, 0, 0) since X_n^2 == 1 there.
struct DriftCoefficients {
  double intercept = 0.0;
  double slope = 0.0;
  double quad = 0.0;
  double sq_intercept = 1.0;
  double sq_slope = 0.0;
  double sq_quad = 0.0;
};

DriftCoefficients drift_coefficients(const Chain& chain);

// Coefficients of the quadratic martingale M_n = S_n^2 + a S_n X_n + b X_n^2 - c n.
// The two-state form has no X_n^2 term (b = 0).
struct QuadraticCoeffs {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;  // per-step compensator
};

// a = (2p-1)/(1-p), compensator c = p/(1-p).
QuadraticCoeffs quadratic_coeffs_two_state(double p);

// a = 2(2p+r-1)/(2-2p-r), b = (q-r)(2p+r)/((1+r-q)(2-2p-r)),
// c = (1-q)(2p+r)/((1+r-q)(2-2p-r)).
QuadraticCoeffs quadratic_coeffs_delay(const SymmetricDelayChain& chain);

// Parameters of the exponential martingale M_n = lambda^(S_n + a X_n^2 + b X_n),
// found by solving the three-equation nonlinear system in the re-parametrized
// unknowns (x, y, z) = (lambda, lambda^a, lambda^b).
struct MartingaleParams {
  double lambda = 1.0;
  double a = 0.0;
  double b = 0.0;
  double x = 1.0, y = 1.0, z = 1.0;
  double residual = 0.0;  // max-norm residual of the system at (x, y, z)
  int iterations = 0;     // Newton iterations of the returned root
  int start_index = 0;    // which multistart point produced it
};

// Damped Newton from a fixed ladder of starts x0 in {0.1, ..., 3.0} \ {1},
// y0 = z0 = 1. Throws Error(DegenerateDrift) when the stationary drift is
// (numerically) zero, in which case only the trivial root x = 1 exists and
// the additive martingale must be used instead; throws Error(NoConvergence)
// when no start yields a nontrivial root.
MartingaleParams solve_exponential(const GeneralChain& chain);

// All distinct nontrivial roots found across the multistart ladder, in start
// order. Used to assert that every root implies the same ruin probability.
std::vector<MartingaleParams> solve_exponential_all(const GeneralChain& chain);

// Coefficients of the additive martingale M_n = S_n + a2 X_n^2 + a1 X_n - c n,
// normalized so the S_n coefficient is 1. For a chain in detailed drift
// balance the compensator c vanishes and M_n is bounded up to tau.
struct AdditiveCoeffs {
  double a2 = 0.0;
  double a1 = 0.0;
  double c = 0.0;
};

AdditiveCoeffs additive_coeffs(const GeneralChain& chain);

// Long-run drift sum_s pi(s) E(X_n | X_{n-1}=s) under the stationary law.
double stationary_drift(const GeneralChain& chain);

// Ruin probability for a general chain by optional stopping: the exponential
// martingale when the drift is nonzero, the additive martingale otherwise.
// The initial law is the chain's own (arbitrary starts are supported).
// expected_tau is not filled here; cross-check with the oracle for that.
RuinSolution ruin_general(const GeneralChain& chain, Barriers b);

}  // namespace crw::martingale
