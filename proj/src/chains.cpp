#include "crw/chains.hpp"

#include <cmath>
#include <sstream>

#include "crw/errors.hpp"
#include "crw/linalg.hpp"

namespace crw {

namespace {

bool in_unit_closed(double v) { return v >= 0.0 && v <= 1.0; }

void check_prob(std::vector<std::string>& out, const char* name, double v) {
  if (!std::isfinite(v) || !in_unit_closed(v)) {
    std::ostringstream msg;
    msg << name << " out of range [0,1]: " << v;
    out.push_back(msg.str());
  }
}

void check_prob_open(std::vector<std::string>& out, const char* name, double v) {
  if (!std::isfinite(v) || !(v > 0.0 && v < 1.0)) {
    std::ostringstream msg;
    msg << name << " out of range (0,1): " << v;
    out.push_back(msg.str());
  }
}

void check_pair_sum(std::vector<std::string>& out, const char* expr, double sum) {
  if (sum > 1.0 + kProbTol) {
    std::ostringstream msg;
    msg << expr << " exceeds 1: " << sum;
    out.push_back(msg.str());
  }
}

}  // namespace

std::array<std::array<double, 3>, 3> GeneralChain::matrix() const {
  return {{{p, p0, 1.0 - p - p0},
           {r1, r, 1.0 - r - r1},
           {1.0 - q - q0, q0, q}}};
}

TwoStateChain make_two_state(double p, double q) {
  TwoStateChain c{p, q, {}};
  c.initial = stationary_two_state(c);
  return c;
}

TwoStateChain make_two_state(double p, double q, double initial_up) {
  return TwoStateChain{p, q, {initial_up, 1.0 - initial_up}};
}

SymmetricDelayChain make_symmetric_delay(double p, double q, double r) {
  return SymmetricDelayChain{p, q, r};
}

GeneralChain make_general(const std::array<std::array<double, 3>, 3>& m,
                          const InitialDist3& initial) {
  GeneralChain c;
  c.p = m[0][0];
  c.p0 = m[0][1];
  c.r1 = m[1][0];
  c.r = m[1][1];
  c.q0 = m[2][1];
  c.q = m[2][2];
  c.initial = initial;
  return c;
}

GeneralChain make_general_stationary(const std::array<std::array<double, 3>, 3>& m) {
  GeneralChain c = make_general(m, InitialDist3{0, 1, 0});
  c.initial = stationary_general(c);
  return c;
}

std::vector<std::string> validate(const TwoStateChain& c) {
  std::vector<std::string> out;
  check_prob_open(out, "p", c.p);
  check_prob_open(out, "q", c.q);
  check_prob(out, "initial[1]", c.initial.up);
  check_prob(out, "initial[-1]", c.initial.down);
  if (std::abs(c.initial.up + c.initial.down - 1.0) > kProbTol)
    out.push_back("initial distribution does not sum to 1");
  return out;
}

std::vector<std::string> validate(const SymmetricDelayChain& c) {
  std::vector<std::string> out;
  auto check_half_open = [&](const char* name, double v) {
    if (!std::isfinite(v) || !(v >= 0.0 && v < 1.0)) {
      std::ostringstream msg;
      msg << name << " out of range [0,1): " << v;
      out.push_back(msg.str());
    }
  };
  check_half_open("p", c.p);
  check_half_open("q", c.q);
  check_half_open("r", c.r);
  check_pair_sum(out, "p+r", c.p + c.r);
  return out;
}

std::vector<std::string> validate(const GeneralChain& c) {
  std::vector<std::string> out;
  check_prob(out, "p", c.p);
  check_prob(out, "p0", c.p0);
  check_prob(out, "r1", c.r1);
  check_prob(out, "r", c.r);
  check_prob(out, "q", c.q);
  check_prob(out, "q0", c.q0);
  check_pair_sum(out, "p+p0", c.p + c.p0);
  check_pair_sum(out, "r+r1", c.r + c.r1);
  check_pair_sum(out, "q+q0", c.q + c.q0);
  if (c.initial.up < -kProbTol) out.push_back("initial[1] negative");
  if (c.initial.mid < -kProbTol) out.push_back("initial[0] negative");
  if (c.initial.down < -kProbTol) out.push_back("initial[-1] negative");
  if (std::abs(c.initial.up + c.initial.mid + c.initial.down - 1.0) > kProbTol)
    out.push_back("initial distribution does not sum to 1");
  return out;
}

std::vector<std::string> validate(const Chain& c) {
  return std::visit([](const auto& chain) { return validate(chain); }, c);
}

void ensure_valid(const Chain& c) {
  auto violations = validate(c);
  if (violations.empty()) return;
  std::string msg = "invalid chain:";
  for (const auto& v : violations) msg += " " + v + ";";
  fail(ErrorCode::Domain, msg);
}

InitialDist2 stationary_two_state(const TwoStateChain& c) {
  const double denom = 2.0 - c.p - c.q;
  return {(1.0 - c.q) / denom, (1.0 - c.p) / denom};
}

InitialDist3 stationary_delay(const SymmetricDelayChain& c) {
  const double denom = 1.0 + c.r - c.q;
  const double edge = (1.0 - c.q) / (2.0 * denom);
  return {edge, c.r / denom, edge};
}

InitialDist3 stationary_general(const GeneralChain& c) {
  const auto m = c.matrix();
  // pi * P = pi with sum(pi) = 1: rows of (P^T - I) sum to zero, so replacing
  // the last row by the normalization keeps the system nonsingular exactly
  // when the stationary vector is unique.
  std::vector<double> a(9), rhs{0.0, 0.0, 1.0};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j) a[i * 3 + j] = m[j][i] - (i == j ? 1.0 : 0.0);
  for (int j = 0; j < 3; ++j) a[2 * 3 + j] = 1.0;

  std::vector<double> pi;
  try {
    pi = linalg::solve(a, rhs);
  } catch (const Error&) {
    fail(ErrorCode::Reducible, "chain has no unique stationary distribution");
  }
  for (double& v : pi) {
    if (v < 0.0) {
      if (v < -1e-9) fail(ErrorCode::Reducible, "stationary solve produced negative mass");
      v = 0.0;
    }
  }
  return {pi[0], pi[1], pi[2]};
}

std::vector<double> stationary(const Chain& c) {
  if (const auto* two = std::get_if<TwoStateChain>(&c)) {
    auto s = stationary_two_state(*two);
    return {s.up, s.down};
  }
  if (const auto* delay = std::get_if<SymmetricDelayChain>(&c)) {
    auto s = stationary_delay(*delay);
    return {s.up, s.mid, s.down};
  }
  auto s = stationary_general(std::get<GeneralChain>(c));
  return {s.up, s.mid, s.down};
}

GeneralChain embed(const TwoStateChain& c) {
  GeneralChain g;
  g.p = c.p;
  g.p0 = 0.0;
  // State 0 is unreachable; its row is chosen so the conditional step mean of
  // the embedding matches the two-state chain exactly (no spurious X^2 term).
  g.r1 = (1.0 + c.p - c.q) / 2.0;
  g.r = 0.0;
  g.q = c.q;
  g.q0 = 0.0;
  g.initial = {c.initial.up, 0.0, c.initial.down};
  return g;
}

GeneralChain embed(const SymmetricDelayChain& c) {
  GeneralChain g;
  g.p = c.p;
  g.p0 = c.r;
  g.r1 = (1.0 - c.q) / 2.0;
  g.r = c.q;
  g.q = c.p;
  g.q0 = c.r;
  g.initial = stationary_delay(c);
  return g;
}

namespace {

IncrementKernel base_kernel(const Chain& c) {
  IncrementKernel k;
  if (const auto* two = std::get_if<TwoStateChain>(&c)) {
    k.states = {1, -1};
    k.rows = {{two->p, 1.0 - two->p}, {1.0 - two->q, two->q}};
    k.initial = {two->initial.up, two->initial.down};
    return k;
  }
  k.states = {1, 0, -1};
  std::array<std::array<double, 3>, 3> m;
  if (const auto* delay = std::get_if<SymmetricDelayChain>(&c)) {
    m = embed(*delay).matrix();
    auto s = stationary_delay(*delay);
    k.initial = {s.up, s.mid, s.down};
  } else {
    const auto& g = std::get<GeneralChain>(c);
    m = g.matrix();
    k.initial = {g.initial.up, g.initial.mid, g.initial.down};
  }
  for (const auto& row : m) k.rows.push_back({row[0], row[1], row[2]});
  return k;
}

}  // namespace

IncrementKernel kernel(const Chain& c) { return base_kernel(c); }

IncrementKernel kernel(const Chain& c, std::span<const double> initial) {
  IncrementKernel k = base_kernel(c);
  if (initial.size() != k.states.size())
    fail(ErrorCode::Domain, "initial distribution has wrong length for this chain");
  double sum = 0.0;
  for (double v : initial) {
    if (v < -kProbTol) fail(ErrorCode::Domain, "initial distribution has negative mass");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kProbTol)
    fail(ErrorCode::Domain, "initial distribution does not sum to 1");
  k.initial.assign(initial.begin(), initial.end());
  return k;
}

int num_states(const Chain& c) {
  return std::holds_alternative<TwoStateChain>(c) ? 2 : 3;
}

}  // namespace crw
