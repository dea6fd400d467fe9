#pragma once

#include "crw/chains.hpp"
#include "crw/ruin.hpp"

namespace crw::analytic {

// Closed forms for the two-state and symmetric-delay families. All of them
// assume the walk starts from the stationary distribution and that tau is the
// first index k >= 1 with S_k in {A, -B}.

// Symmetric two-state chain (p == q):
//   alpha = (B - 1 + (1/2)/(1-p)) / (A + B - 2 + 1/(1-p))
double ruin_symmetric(double p, Barriers b);

// Symmetric two-state chain:
//   E(tau) = A*B*(1-p)/p + (A+B)*(2p-1)/(2p)
double etau_symmetric(double p, Barriers b);

// Asymmetric two-state chain (p != q), via the exponential martingale with
// base lambda = q/p and lambda^a = sqrt((1-p)p / ((1-q)q)).
// Throws Error(DegenerateLambda) when |p - q| < 1e-10.
double ruin_asymmetric(const TwoStateChain& chain, Barriers b);

// Asymmetric two-state chain: solves the optional-stopping identity of the
// additive martingale for E(tau); alpha must come from ruin_asymmetric.
double etau_asymmetric(const TwoStateChain& chain, Barriers b, double alpha);

// Symmetric chain with delays:
//   alpha = (B - 1 + 1/(2-2p-r)) / (A + B - 2 + 2/(2-2p-r))
// The delay persistence q does not enter.
double ruin_symmetric_delays(double p, double r, Barriers b);

// Symmetric chain with delays:
//   E(tau) = A*B*(1+r-q)(2-2p-r)/((1-q)(2p+r))
//          + (A+B)*(2p+r-1)(1+r-q)/((1-q)(2p+r))
//          + (q-r)r/((1-q)(1+r-q))
// Throws Error(Domain) when 2p + r == 0 (the walk never moves).
double etau_symmetric_delays(const SymmetricDelayChain& chain, Barriers b);

// The HH-vs-TH pattern game: alpha = (B - 1/2) / (A + B).
double ruin_two_pattern(Barriers b);

// Bundles the matching closed forms for a two-state or symmetric-delay chain
// into a RuinSolution. Throws Error(Domain) for general chains (no closed
// form exists; use the martingale solver or the oracle).
RuinSolution solve(const Chain& chain, Barriers b);

}  // namespace crw::analytic
