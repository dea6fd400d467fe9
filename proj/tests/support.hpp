#pragma once

// Shared helpers and independent test oracles. Everything in here is kept
// deliberately separate from the library's own algorithms: power iteration
// instead of linear solves, raw flip-prefix dynamic programming instead of
// the pattern automaton, and a direct conditional-expectation sweep for
// martingale checks.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "crw/chains.hpp"

namespace testsupport {

// Stationary law by damped power iteration (the 1/2-lazy chain shares the
// stationary vector and is aperiodic, so this converges for every chain with
// a unique stationary law).
inline std::vector<double> power_iteration(const std::vector<std::vector<double>>& rows,
                                           int iters = 200000) {
  const std::size_t n = rows.size();
  std::vector<double> v(n, 1.0 / static_cast<double>(n)), w(n, 0.0);
  for (int it = 0; it < iters; ++it) {
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.5 * v[j];
      for (std::size_t i = 0; i < n; ++i) acc += 0.5 * v[i] * rows[i][j];
      w[j] = acc;
    }
    v.swap(w);
  }
  return v;
}

// Largest one-step conditional-expectation defect of a candidate martingale
// f(S, X, n) over all previous states and |S| <= s_max.
inline double martingale_residual(const crw::IncrementKernel& k,
                                  const std::function<double(double, double, double)>& f,
                                  int s_max = 10, double n = 7.0) {
  double worst = 0.0;
  const int ns = static_cast<int>(k.states.size());
  for (int s = -s_max; s <= s_max; ++s) {
    for (int j = 0; j < ns; ++j) {
      double expect = 0.0;
      for (int jj = 0; jj < ns; ++jj)
        expect += k.rows[j][jj] * f(s + k.states[jj], k.states[jj], n);
      worst = std::max(worst, std::abs(expect - f(s, k.states[j], n - 1.0)));
    }
  }
  return worst;
}

// Conway-style waiting time for a fair coin: sum of 2^k over every prefix of
// length k that is also a suffix (the whole pattern counts).
inline double overlap_sum_fair(const std::string& pat) {
  double total = 0.0;
  const std::size_t len = pat.size();
  for (std::size_t k = 1; k <= len; ++k)
    if (pat.compare(0, k, pat, len - k, k) == 0) total += std::pow(2.0, static_cast<double>(k));
  return total;
}

namespace detail {

// Alive-mass dynamic programming over raw flip windows. The state is the
// last (max pattern length - 1) flips of a not-yet-terminated prefix; this
// is exact for patterns up to that length and shares nothing with the
// library's automaton machinery.
struct FlipDp {
  std::vector<std::string> pats;
  double bias;
  std::size_t window;

  FlipDp(std::vector<std::string> patterns, double coin_bias)
      : pats(std::move(patterns)), bias(coin_bias) {
    std::size_t longest = 1;
    for (const auto& p : pats) longest = std::max(longest, p.size());
    window = longest - 1;
  }

  bool completes(const std::string& text, const std::string& pat) const {
    return text.size() >= pat.size() &&
           text.compare(text.size() - pat.size(), pat.size(), pat) == 0;
  }
};

}  // namespace detail

// Expected flips until the first occurrence of any pattern, truncated at
// `horizon`; the leftover alive mass is returned through tail_mass so the
// caller can bound the truncation error.
inline double brute_force_waiting_either(const std::vector<std::string>& pats,
                                         double bias, int horizon,
                                         double* tail_mass = nullptr) {
  detail::FlipDp dp(pats, bias);
  std::vector<std::pair<std::string, double>> alive{{"", 1.0}};
  double expect = 0.0;
  for (int t = 1; t <= horizon && !alive.empty(); ++t) {
    std::vector<std::pair<std::string, double>> next;
    for (const auto& [ctx, mass] : alive) {
      for (int c = 0; c < 2; ++c) {
        const double step = mass * (c == 0 ? bias : 1.0 - bias);
        if (step <= 0.0) continue;
        std::string text = ctx + (c == 0 ? 'H' : 'T');
        bool done = false;
        for (const auto& p : dp.pats) done = done || dp.completes(text, p);
        if (done) {
          expect += step * t;
        } else {
          if (text.size() > dp.window) text.erase(0, text.size() - dp.window);
          bool merged = false;
          for (auto& [octx, omass] : next)
            if (octx == text) {
              omass += step;
              merged = true;
              break;
            }
          if (!merged) next.emplace_back(text, step);
        }
      }
    }
    alive.swap(next);
  }
  double leftover = 0.0;
  for (const auto& [ctx, mass] : alive) leftover += mass;
  if (tail_mass) *tail_mass = leftover;
  return expect;
}

// P(win strictly before lose) by the same flip DP; a flip completing both
// counts for lose, matching the library convention.
inline double brute_force_prob_first(const std::string& win, const std::string& lose,
                                     double bias, int horizon,
                                     double* tail_mass = nullptr) {
  detail::FlipDp dp({win, lose}, bias);
  std::vector<std::pair<std::string, double>> alive{{"", 1.0}};
  double p_win = 0.0;
  for (int t = 1; t <= horizon && !alive.empty(); ++t) {
    std::vector<std::pair<std::string, double>> next;
    for (const auto& [ctx, mass] : alive) {
      for (int c = 0; c < 2; ++c) {
        const double step = mass * (c == 0 ? bias : 1.0 - bias);
        if (step <= 0.0) continue;
        std::string text = ctx + (c == 0 ? 'H' : 'T');
        const bool won = dp.completes(text, win);
        const bool lost = dp.completes(text, lose);
        if (won && !lost) {
          p_win += step;
        } else if (!won && !lost) {
          if (text.size() > dp.window) text.erase(0, text.size() - dp.window);
          bool merged = false;
          for (auto& [octx, omass] : next)
            if (octx == text) {
              omass += step;
              merged = true;
              break;
            }
          if (!merged) next.emplace_back(text, step);
        }
        // won && lost: tie, counted for lose
      }
    }
    alive.swap(next);
  }
  double leftover = 0.0;
  for (const auto& [ctx, mass] : alive) leftover += mass;
  if (tail_mass) *tail_mass = leftover;
  return p_win;
}

// Pinned chains used across the suites.
inline crw::GeneralChain example_chain() {
  // rows (1/2, 1/4, 1/4), (1/3, 1/3, 1/3), (1/8, 1/8, 3/4); start at 0
  return crw::make_general({{{0.5, 0.25, 0.25},
                             {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0},
                             {0.125, 0.125, 0.75}}},
                           crw::InitialDist3{0.0, 1.0, 0.0});
}

inline crw::GeneralChain pattern_chain() {
  // the HH-vs-TH payoff chain with the law of the first payoff as start
  return crw::make_general({{{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.5, 0.0}}},
                           crw::InitialDist3{0.25, 0.5, 0.25});
}

// Mirror of a general chain: states 1 and -1 swapped, initial law reversed.
inline crw::GeneralChain mirrored(const crw::GeneralChain& c) {
  crw::GeneralChain m;
  m.p = c.q;
  m.p0 = c.q0;
  m.r1 = 1.0 - c.r - c.r1;
  m.r = c.r;
  m.q = c.p;
  m.q0 = c.p0;
  m.initial = {c.initial.down, c.initial.mid, c.initial.up};
  return m;
}

}  // namespace testsupport
