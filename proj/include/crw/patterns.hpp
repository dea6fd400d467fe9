#pragma once

#include <span>
#include <string>
#include <string_view>

#include "crw/chains.hpp"

namespace crw::patterns {

// A coin-flip pattern over {H, T}. Parsing is case-insensitive; anything
// else is a parse error.
struct Pattern {
  std::string symbols;

  static Pattern parse(std::string_view text);
  std::size_t length() const { return symbols.size(); }
  bool operator==(const Pattern&) const = default;
};

// A win/lose pattern race: +$1 per win_pattern occurrence, -$1 per
// lose_pattern occurrence, overlapping occurrences counted.
struct PatternGame {
  Pattern win;
  Pattern lose;
  double coin_bias = 0.5;  // P(H)
};

// Expected number of (possibly overlapping) occurrences in `flips` tosses:
// (flips - len + 1) * prod(per-symbol probability).
double expected_count(const Pattern& pat, long flips, double coin_bias = 0.5);

// Expected number of flips until the pattern first completes, by first-step
// analysis on the pattern-prefix automaton. For a fair coin this equals the
// classic self-overlap sum (HH -> 6, TH -> 4).
double waiting_time(const Pattern& pat, double coin_bias = 0.5);

// Expected flips until any of the patterns completes (combined automaton).
double waiting_time_either(std::span<const Pattern> pats, double coin_bias = 0.5);

// P(win completes strictly before lose). A flip completing both at once is
// possible only when one pattern is a proper suffix of the other; such ties
// count for `lose` and are flagged.
struct RaceResult {
  double p_win_first = 0.0;
  bool tie_possible = false;
};

RaceResult race(const Pattern& win, const Pattern& lose, double coin_bias = 0.5);
double prob_first(const Pattern& win, const Pattern& lose, double coin_bias = 0.5);

// Exact first-order-Markov test for the payoff sequence of a length-2
// pattern game: compares P(X_{n+1} | X_n) with P(X_{n+1} | X_n, X_{n-1})
// computed from the exact law of four-flip windows.
struct MarkovCheck {
  bool is_markov = true;
  // witness conditional, filled when not Markov (values in {1, 0, -1})
  int prev2 = 0;
  int prev = 0;
  int next = 0;
  double p_one_lag = 0.0;
  double p_two_lag = 0.0;
};

MarkovCheck markov_check(const PatternGame& game);

// Compiles the payoff process into a three-state chain with the exact
// one-step law and the law of the first payoff as initial distribution.
// Throws Error(NotMarkov) when the payoff process fails markov_check.
// Note the payoff clock: step n of the returned chain is flip n+1, so ruin
// times for the compiled chain count payoffs, not flips.
GeneralChain build_payoff_chain(const PatternGame& game);

}  // namespace crw::patterns
