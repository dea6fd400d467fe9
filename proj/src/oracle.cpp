#include "crw/oracle.hpp"

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "crw/errors.hpp"
#include "crw/linalg.hpp"

namespace crw::oracle {

namespace {

// Lattice of interior states (position m in (-B, A), last increment index),
// restricted to those reachable from the initial law. Restricting matters:
// full-grid assembly would drag in unreachable trap states (say an absorbing
// delay row) and make the system singular even for well-posed starts.
struct HittingSystem {
  IncrementKernel k;
  int A = 1, B = 1;
  int width = 1;                         // interior positions: A + B - 1
  std::vector<int> compact;              // (pos,last) -> unknown index or -1
  std::vector<std::pair<int, int>> cells;  // unknown index -> (pos, last)

  int slot(int m, int j) const {
    return (m + B - 1) * static_cast<int>(k.states.size()) + j;
  }
  bool interior(int m) const { return m > -B && m < A; }
};

// Dense assembly is meant for desk-scale barriers; refuse sizes that would
// silently chew through gigabytes instead.
constexpr int kMaxInteriorWidth = 100'000;
constexpr std::size_t kMaxDenseUnknowns = 4'000;

HittingSystem build_system(IncrementKernel k, Barriers b) {
  if (b.A + b.B - 1 > kMaxInteriorWidth)
    fail(ErrorCode::Domain, "barriers too large for the lattice solver (A+B > 100001)");
  HittingSystem sys;
  sys.k = std::move(k);
  sys.A = b.A;
  sys.B = b.B;
  sys.width = b.A + b.B - 1;
  const int ns = static_cast<int>(sys.k.states.size());
  sys.compact.assign(static_cast<std::size_t>(sys.width) * ns, -1);

  std::vector<std::pair<int, int>> frontier;
  auto visit = [&](int m, int j) {
    const int s = sys.slot(m, j);
    if (sys.compact[s] >= 0) return;
    sys.compact[s] = static_cast<int>(sys.cells.size());
    sys.cells.emplace_back(m, j);
    frontier.emplace_back(m, j);
  };

  for (int j = 0; j < ns; ++j) {
    if (sys.k.initial[j] <= 0.0) continue;
    const int m = sys.k.states[j];
    if (sys.interior(m)) visit(m, j);
  }
  while (!frontier.empty()) {
    auto [m, j] = frontier.back();
    frontier.pop_back();
    for (int jj = 0; jj < ns; ++jj) {
      if (sys.k.rows[j][jj] <= 0.0) continue;
      const int m2 = m + sys.k.states[jj];
      if (sys.interior(m2)) visit(m2, jj);
    }
  }
  return sys;
}

enum class Rhs { HitUpper, UnitCost };

std::vector<double> solve_hitting(const HittingSystem& sys, Rhs kind, SolveStats* stats) {
  const std::size_t n = sys.cells.size();
  if (n > kMaxDenseUnknowns)
    fail(ErrorCode::Domain,
         "too many lattice states for the dense first-step solve; "
         "use enumeration or simulation for barriers this wide");
  std::vector<double> a(n * n, 0.0), rhs(n, 0.0);
  const int ns = static_cast<int>(sys.k.states.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto [m, j] = sys.cells[i];
    a[i * n + i] = 1.0;
    if (kind == Rhs::UnitCost) rhs[i] = 1.0;
    for (int jj = 0; jj < ns; ++jj) {
      const double p = sys.k.rows[j][jj];
      if (p <= 0.0) continue;
      const int m2 = m + sys.k.states[jj];
      if (m2 >= sys.A) {
        if (kind == Rhs::HitUpper) rhs[i] += p;
      } else if (m2 <= -sys.B) {
        // absorbed below: contributes 0
      } else {
        a[i * n + sys.compact[sys.slot(m2, jj)]] -= p;
      }
    }
  }
  auto x = linalg::solve(a, rhs);
  if (stats) {
    stats->unknowns = n;
    stats->residual = linalg::residual_inf(a, x, rhs);
  }
  return x;
}

void require_absorbing(const HittingSystem& sys) {
  const std::size_t n = sys.cells.size();
  const int ns = static_cast<int>(sys.k.states.size());
  std::vector<char> can(n, 0);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (can[i]) continue;
      const auto [m, j] = sys.cells[i];
      for (int jj = 0; jj < ns; ++jj) {
        if (sys.k.rows[j][jj] <= 0.0) continue;
        const int m2 = m + sys.k.states[jj];
        const bool ok = !sys.interior(m2) || can[sys.compact[sys.slot(m2, jj)]];
        if (ok) {
          can[i] = 1;
          changed = true;
          break;
        }
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!can[i])
      fail(ErrorCode::NonAbsorbing,
           "a reachable state cannot reach either barrier; E(tau) diverges");
}

double alpha_impl(IncrementKernel k, Barriers b, SolveStats* stats) {
  auto sys = build_system(std::move(k), b);
  std::vector<double> h;
  if (!sys.cells.empty()) h = solve_hitting(sys, Rhs::HitUpper, stats);
  else if (stats) *stats = {};

  double alpha = 0.0;
  const int ns = static_cast<int>(sys.k.states.size());
  for (int j = 0; j < ns; ++j) {
    const double w = sys.k.initial[j];
    if (w <= 0.0) continue;
    const int m = sys.k.states[j];
    if (m >= sys.A) alpha += w;
    else if (m <= -sys.B) continue;
    else alpha += w * h[sys.compact[sys.slot(m, j)]];
  }
  return alpha;
}

double etau_impl(IncrementKernel k, Barriers b, SolveStats* stats) {
  auto sys = build_system(std::move(k), b);
  require_absorbing(sys);
  std::vector<double> g;
  if (!sys.cells.empty()) g = solve_hitting(sys, Rhs::UnitCost, stats);
  else if (stats) *stats = {};

  double expect = 1.0;  // the first step is step 1
  const int ns = static_cast<int>(sys.k.states.size());
  for (int j = 0; j < ns; ++j) {
    const double w = sys.k.initial[j];
    if (w <= 0.0) continue;
    const int m = sys.k.states[j];
    if (sys.interior(m)) expect += w * g[sys.compact[sys.slot(m, j)]];
  }
  return expect;
}

void check_pre(const Chain& chain, Barriers b) {
  ensure_valid(chain);
  ensure_valid(b);
}

}  // namespace

double first_step_alpha(const Chain& chain, Barriers b, SolveStats* stats) {
  check_pre(chain, b);
  return alpha_impl(kernel(chain), b, stats);
}

double first_step_alpha(const Chain& chain, std::span<const double> initial, Barriers b,
                        SolveStats* stats) {
  check_pre(chain, b);
  return alpha_impl(kernel(chain, initial), b, stats);
}

double first_step_etau(const Chain& chain, Barriers b, SolveStats* stats) {
  check_pre(chain, b);
  return etau_impl(kernel(chain), b, stats);
}

double first_step_etau(const Chain& chain, std::span<const double> initial, Barriers b,
                       SolveStats* stats) {
  check_pre(chain, b);
  return etau_impl(kernel(chain, initial), b, stats);
}

namespace {

PathBracket enumerate_impl(const IncrementKernel& k, Barriers b, long horizon,
                           std::uint64_t node_cap) {
  if (horizon < 1) fail(ErrorCode::Domain, "horizon must be at least 1");
  if (b.A + b.B - 1 > kMaxInteriorWidth)
    fail(ErrorCode::Domain, "barriers too large for the lattice solver (A+B > 100001)");

  const int ns = static_cast<int>(k.states.size());
  const int width = b.A + b.B - 1;
  const std::size_t n_slots = static_cast<std::size_t>(width) * ns;
  std::vector<double> cur(n_slots, 0.0), nxt(n_slots, 0.0);
  auto slot = [&](int m, int j) { return static_cast<std::size_t>(m + b.B - 1) * ns + j; };

  double up = 0.0;
  std::uint64_t nodes = 0;

  // level 1: distribute the first increment
  for (int j = 0; j < ns; ++j) {
    const double w = k.initial[j];
    if (w <= 0.0) continue;
    ++nodes;
    const int m = k.states[j];
    if (m >= b.A) up += w;
    else if (m > -b.B) cur[slot(m, j)] += w;
  }

  for (long level = 2; level <= horizon; ++level) {
    std::fill(nxt.begin(), nxt.end(), 0.0);
    bool any = false;
    for (int m = -b.B + 1; m < b.A; ++m) {
      for (int j = 0; j < ns; ++j) {
        const double w = cur[slot(m, j)];
        if (w <= 0.0) continue;
        any = true;
        if (++nodes > node_cap)
          fail(ErrorCode::BudgetExceeded, "path expansion exceeded the node budget");
        for (int jj = 0; jj < ns; ++jj) {
          const double p = k.rows[j][jj];
          if (p <= 0.0) continue;
          const double mass = w * p;
          const int m2 = m + k.states[jj];
          if (m2 >= b.A) up += mass;
          else if (m2 > -b.B) nxt[slot(m2, jj)] += mass;
        }
      }
    }
    cur.swap(nxt);
    if (!any) break;
  }

  double unresolved = 0.0;
  for (double w : cur) unresolved += w;
  return {up, up + unresolved, unresolved};
}

}  // namespace

PathBracket enumerate_paths(const Chain& chain, Barriers b, long horizon,
                            std::uint64_t node_cap) {
  check_pre(chain, b);
  return enumerate_impl(kernel(chain), b, horizon, node_cap);
}

PathBracket enumerate_paths(const Chain& chain, std::span<const double> initial,
                            Barriers b, long horizon, std::uint64_t node_cap) {
  check_pre(chain, b);
  return enumerate_impl(kernel(chain, initial), b, horizon, node_cap);
}

}  // namespace crw::oracle
