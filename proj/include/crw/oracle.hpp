#pragma once

#include <cstdint>
#include <span>

#include "crw/chains.hpp"
#include "crw/ruin.hpp"

namespace crw::oracle {

// Exact ground truth, independent of every closed form: absorption
// probabilities and expected absorption times by first-step analysis on the
// lattice of (position, last increment) states, solved densely.
//
// Convention shared with the whole library: tau = inf{k >= 1 : S_k in
// {A, -B}} with S_1 = X_1, so a start that absorbs immediately has tau = 1,
// and a zero increment never absorbs (the position does not change).

struct SolveStats {
  std::size_t unknowns = 0;
  double residual = 0.0;  // max-norm residual of the linear solve
};

// P(S_tau = A). The overloads without an explicit initial law use the
// chain's own start (stationary for symmetric-delay chains).
double first_step_alpha(const Chain& chain, Barriers b, SolveStats* stats = nullptr);
double first_step_alpha(const Chain& chain, std::span<const double> initial, Barriers b,
                        SolveStats* stats = nullptr);

// E(tau). Throws Error(NonAbsorbing) when some reachable state cannot reach
// a barrier (the expectation diverges structurally).
double first_step_etau(const Chain& chain, Barriers b, SolveStats* stats = nullptr);
double first_step_etau(const Chain& chain, std::span<const double> initial, Barriers b,
                       SolveStats* stats = nullptr);

// Exhaustive expansion of the walk up to `horizon` steps with exact merging
// of equal (position, last) states per level. Yields rigorous bounds
// alpha in [alpha_lower, alpha_upper] with alpha_upper - alpha_lower equal to
// the unresolved probability mass still in flight at the horizon.
struct PathBracket {
  double alpha_lower = 0.0;
  double alpha_upper = 1.0;
  double mass_unresolved = 1.0;
};

PathBracket enumerate_paths(const Chain& chain, Barriers b, long horizon,
                            std::uint64_t node_cap = 10'000'000);
PathBracket enumerate_paths(const Chain& chain, std::span<const double> initial,
                            Barriers b, long horizon,
                            std::uint64_t node_cap = 10'000'000);

// Seeded Monte Carlo. Reruns with identical (seed, n_paths, partitions) are
// bit-identical; partitions may execute on separate threads, each on its own
// jump-separated stream, and are merged in partition order.
struct MonteCarloResult {
  double alpha_hat = 0.0;
  double tau_hat = 0.0;
  double stderr_alpha = 0.0;
  double stderr_tau = 0.0;
  std::uint64_t n_paths = 0;
  std::uint64_t seed = 0;
  std::uint64_t truncated_paths = 0;  // paths exceeding step_cap, excluded
  std::uint32_t partitions = 1;
};

MonteCarloResult simulate(const Chain& chain, Barriers b, std::uint64_t n_paths,
                          std::uint64_t seed, std::uint64_t step_cap = 1'000'000,
                          std::uint32_t partitions = 1);
MonteCarloResult simulate(const Chain& chain, std::span<const double> initial,
                          Barriers b, std::uint64_t n_paths, std::uint64_t seed,
                          std::uint64_t step_cap = 1'000'000,
                          std::uint32_t partitions = 1);

}  // namespace crw::oracle
