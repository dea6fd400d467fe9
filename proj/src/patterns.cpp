#include "crw/patterns.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <deque>
#include <sstream>
#include <vector>

#include "crw/errors.hpp"
#include "crw/linalg.hpp"

namespace crw::patterns {

namespace {

void require_bias_open(double bias) {
  if (!std::isfinite(bias) || !(bias > 0.0 && bias < 1.0))
    fail(ErrorCode::Domain, "coin bias must lie strictly in (0,1)");
}

void require_bias_closed(double bias) {
  if (!std::isfinite(bias) || bias < 0.0 || bias > 1.0)
    fail(ErrorCode::Domain, "coin bias must lie in [0,1]");
}

// Aho-Corasick automaton over the binary alphabet (0 = H, 1 = T).
// out[u] is the bitmask of patterns completed on entering node u, including
// completions via suffix links.
struct Automaton {
  std::vector<std::array<int, 2>> go;
  std::vector<unsigned> out;
};

Automaton build_automaton(std::span<const Pattern> pats) {
  Automaton ac;
  ac.go.push_back({-1, -1});
  ac.out.push_back(0);
  for (std::size_t i = 0; i < pats.size(); ++i) {
    int node = 0;
    for (char sym : pats[i].symbols) {
      const int c = sym == 'H' ? 0 : 1;
      if (ac.go[node][c] < 0) {
        ac.go[node][c] = static_cast<int>(ac.go.size());
        ac.go.push_back({-1, -1});
        ac.out.push_back(0);
      }
      node = ac.go[node][c];
    }
    ac.out[node] |= 1u << i;
  }

  std::vector<int> fail(ac.go.size(), 0);
  std::deque<int> queue;
  for (int c = 0; c < 2; ++c) {
    int& v = ac.go[0][c];
    if (v < 0) v = 0;
    else queue.push_back(v);
  }
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    ac.out[u] |= ac.out[fail[u]];
    for (int c = 0; c < 2; ++c) {
      int& v = ac.go[u][c];
      if (v < 0) {
        v = ac.go[fail[u]][c];
      } else {
        fail[v] = ac.go[fail[u]][c];
        queue.push_back(v);
      }
    }
  }
  return ac;
}

// Expected steps to reach an absorbing node from the root. Shares the dense
// first-step solve with the ruin oracle.
double expected_absorption_steps(const Automaton& ac, double p_heads) {
  std::vector<int> unknown(ac.go.size(), -1);
  std::vector<int> nodes;
  for (std::size_t u = 0; u < ac.go.size(); ++u) {
    if (ac.out[u] == 0) {
      unknown[u] = static_cast<int>(nodes.size());
      nodes.push_back(static_cast<int>(u));
    }
  }
  const std::size_t n = nodes.size();
  std::vector<double> a(n * n, 0.0), rhs(n, 1.0);
  const double probs[2] = {p_heads, 1.0 - p_heads};
  for (std::size_t i = 0; i < n; ++i) {
    a[i * n + i] += 1.0;
    for (int c = 0; c < 2; ++c) {
      const int v = ac.go[nodes[i]][c];
      if (ac.out[v] == 0) a[i * n + unknown[v]] -= probs[c];
    }
  }
  const auto g = linalg::solve(a, rhs);
  return g[unknown[0]];
}

}  // namespace

Pattern Pattern::parse(std::string_view text) {
  if (text.empty()) fail(ErrorCode::Parse, "pattern must be nonempty");
  Pattern pat;
  pat.symbols.reserve(text.size());
  for (char ch : text) {
    const char up = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    if (up != 'H' && up != 'T') {
      std::ostringstream msg;
      msg << "pattern may contain only H and T, got '" << ch << "' in \"" << text << "\"";
      fail(ErrorCode::Parse, msg.str());
    }
    pat.symbols.push_back(up);
  }
  return pat;
}

double expected_count(const Pattern& pat, long flips, double coin_bias) {
  require_bias_closed(coin_bias);
  const long len = static_cast<long>(pat.length());
  if (flips < len) {
    std::ostringstream msg;
    msg << "flip count " << flips << " shorter than pattern length " << len;
    fail(ErrorCode::Domain, msg.str());
  }
  double window = 1.0;
  for (char sym : pat.symbols) window *= sym == 'H' ? coin_bias : 1.0 - coin_bias;
  return static_cast<double>(flips - len + 1) * window;
}

double waiting_time(const Pattern& pat, double coin_bias) {
  require_bias_open(coin_bias);
  const Pattern pats[] = {pat};
  return expected_absorption_steps(build_automaton(pats), coin_bias);
}

double waiting_time_either(std::span<const Pattern> pats, double coin_bias) {
  require_bias_open(coin_bias);
  if (pats.size() < 2) fail(ErrorCode::Domain, "need at least two patterns");
  for (std::size_t i = 0; i < pats.size(); ++i)
    for (std::size_t j = i + 1; j < pats.size(); ++j)
      if (pats[i] == pats[j]) fail(ErrorCode::Domain, "patterns must be distinct");
  return expected_absorption_steps(build_automaton(pats), coin_bias);
}

RaceResult race(const Pattern& win, const Pattern& lose, double coin_bias) {
  require_bias_open(coin_bias);
  if (win == lose) fail(ErrorCode::Domain, "win and lose patterns must be distinct");

  const Pattern pats[] = {win, lose};
  const auto ac = build_automaton(pats);

  RaceResult result;
  for (unsigned mask : ac.out)
    if (mask == 3u) result.tie_possible = true;

  std::vector<int> unknown(ac.go.size(), -1);
  std::vector<int> nodes;
  for (std::size_t u = 0; u < ac.go.size(); ++u) {
    if (ac.out[u] == 0) {
      unknown[u] = static_cast<int>(nodes.size());
      nodes.push_back(static_cast<int>(u));
    }
  }
  const std::size_t n = nodes.size();
  std::vector<double> a(n * n, 0.0), rhs(n, 0.0);
  const double probs[2] = {coin_bias, 1.0 - coin_bias};
  for (std::size_t i = 0; i < n; ++i) {
    a[i * n + i] += 1.0;
    for (int c = 0; c < 2; ++c) {
      const int v = ac.go[nodes[i]][c];
      if (ac.out[v] == 0) a[i * n + unknown[v]] -= probs[c];
      else if (ac.out[v] == 1u) rhs[i] += probs[c];  // win only; ties go to lose
    }
  }
  const auto h = linalg::solve(a, rhs);
  result.p_win_first = h[unknown[0]];
  return result;
}

double prob_first(const Pattern& win, const Pattern& lose, double coin_bias) {
  return race(win, lose, coin_bias).p_win_first;
}

namespace {

// Payoff of a two-flip window under a game: +1 win, -1 lose, 0 otherwise.
int payoff(const PatternGame& game, int first, int second) {
  const char w0 = game.win.symbols[0], w1 = game.win.symbols[1];
  const char l0 = game.lose.symbols[0], l1 = game.lose.symbols[1];
  const char a = first == 0 ? 'H' : 'T';
  const char b = second == 0 ? 'H' : 'T';
  if (a == w0 && b == w1) return 1;
  if (a == l0 && b == l1) return -1;
  return 0;
}

int state_index(int value) { return 1 - value; }  // 1 -> 0, 0 -> 1, -1 -> 2

void require_length_two(const PatternGame& game) {
  if (game.win.length() != 2 || game.lose.length() != 2)
    fail(ErrorCode::Domain, "the payoff-chain machinery handles length-2 patterns only");
  if (game.win == game.lose)
    fail(ErrorCode::Domain, "win and lose patterns must be distinct");
  require_bias_open(game.coin_bias);
}

}  // namespace

MarkovCheck markov_check(const PatternGame& game) {
  require_length_two(game);
  const double pr[2] = {game.coin_bias, 1.0 - game.coin_bias};

  // Exact joint law of (X_{n-1}, X_n, X_{n+1}) from four-flip windows.
  double joint[3][3][3] = {};
  for (int f1 = 0; f1 < 2; ++f1)
    for (int f2 = 0; f2 < 2; ++f2)
      for (int f3 = 0; f3 < 2; ++f3)
        for (int f4 = 0; f4 < 2; ++f4) {
          const double mass = pr[f1] * pr[f2] * pr[f3] * pr[f4];
          joint[state_index(payoff(game, f1, f2))][state_index(payoff(game, f2, f3))]
               [state_index(payoff(game, f3, f4))] += mass;
        }

  double pair_cur_next[3][3] = {};  // (X_n, X_{n+1})
  double pair_prev_cur[3][3] = {};  // (X_{n-1}, X_n)
  double marginal_cur[3] = {};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        pair_cur_next[j][k] += joint[i][j][k];
        pair_prev_cur[i][j] += joint[i][j][k];
        marginal_cur[j] += joint[i][j][k];
      }

  MarkovCheck check;
  const int values[3] = {1, 0, -1};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (pair_prev_cur[i][j] <= 0.0) continue;
      for (int k = 0; k < 3; ++k) {
        const double one_lag = pair_cur_next[j][k] / marginal_cur[j];
        const double two_lag = joint[i][j][k] / pair_prev_cur[i][j];
        if (std::abs(one_lag - two_lag) > 1e-12) {
          check.is_markov = false;
          check.prev2 = values[i];
          check.prev = values[j];
          check.next = values[k];
          check.p_one_lag = one_lag;
          check.p_two_lag = two_lag;
          return check;
        }
      }
    }
  return check;
}

GeneralChain build_payoff_chain(const PatternGame& game) {
  const auto check = markov_check(game);
  if (!check.is_markov) {
    std::ostringstream msg;
    msg << "payoff sequence is not first-order Markov: P(next=" << check.next
        << " | cur=" << check.prev << ") = " << check.p_one_lag
        << " but P(next=" << check.next << " | cur=" << check.prev
        << ", prev=" << check.prev2 << ") = " << check.p_two_lag;
    fail(ErrorCode::NotMarkov, msg.str());
  }

  const double pr[2] = {game.coin_bias, 1.0 - game.coin_bias};
  double pair_cur_next[3][3] = {};
  double marginal_cur[3] = {};
  for (int f2 = 0; f2 < 2; ++f2)
    for (int f3 = 0; f3 < 2; ++f3)
      for (int f4 = 0; f4 < 2; ++f4) {
        const double mass = pr[f2] * pr[f3] * pr[f4];
        const int j = state_index(payoff(game, f2, f3));
        const int k = state_index(payoff(game, f3, f4));
        pair_cur_next[j][k] += mass;
        marginal_cur[j] += mass;
      }

  std::array<std::array<double, 3>, 3> m{};
  for (int j = 0; j < 3; ++j) {
    if (marginal_cur[j] <= 0.0)
      fail(ErrorCode::Domain, "a payoff state has zero probability; cannot form its row");
    for (int k = 0; k < 3; ++k) m[j][k] = pair_cur_next[j][k] / marginal_cur[j];
  }

  // Law of the first payoff, from the first two flips.
  InitialDist3 init{0.0, 0.0, 0.0};
  for (int f1 = 0; f1 < 2; ++f1)
    for (int f2 = 0; f2 < 2; ++f2) {
      const double mass = pr[f1] * pr[f2];
      switch (payoff(game, f1, f2)) {
        case 1: init.up += mass; break;
        case 0: init.mid += mass; break;
        default: init.down += mass; break;
      }
    }
  return make_general(m, init);
}

}  // namespace crw::patterns
