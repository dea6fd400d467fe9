#include "crw/analytic.hpp"

#include <cmath>
#include <sstream>

#include "crw/errors.hpp"

namespace crw {

std::vector<std::string> validate(const Barriers& b) {
  std::vector<std::string> out;
  if (b.A < 1) out.push_back("A must be a positive integer");
  if (b.B < 1) out.push_back("B must be a positive integer");
  return out;
}

void ensure_valid(const Barriers& b) {
  auto violations = validate(b);
  if (violations.empty()) return;
  std::string msg = "invalid barriers:";
  for (const auto& v : violations) msg += " " + v + ";";
  fail(ErrorCode::Domain, msg);
}

namespace analytic {

namespace {

constexpr double kLambdaTol = 1e-10;

void require_open_unit(double p, const char* name) {
  if (!std::isfinite(p) || !(p > 0.0 && p < 1.0)) {
    std::ostringstream msg;
    msg << name << " must lie in (0,1), got " << p;
    fail(ErrorCode::Domain, msg.str());
  }
}

void require_degenerate_free(double p, double q) {
  if (std::abs(p - q) < kLambdaTol)
    fail(ErrorCode::DegenerateLambda,
         "p == q: lambda = q/p is 1; use the symmetric closed forms");
}

}  // namespace

double ruin_symmetric(double p, Barriers b) {
  require_open_unit(p, "p");
  ensure_valid(b);
  const double h = 1.0 / (1.0 - p);
  return (b.B - 1.0 + 0.5 * h) / (b.A + b.B - 2.0 + h);
}

double etau_symmetric(double p, Barriers b) {
  require_open_unit(p, "p");
  ensure_valid(b);
  return b.A * b.B * (1.0 - p) / p + (b.A + b.B) * (2.0 * p - 1.0) / (2.0 * p);
}

double ruin_asymmetric(const TwoStateChain& chain, Barriers b) {
  ensure_valid(Chain{chain});
  ensure_valid(b);
  const double p = chain.p, q = chain.q;
  require_degenerate_free(p, q);

  const double lambda = q / p;
  const double lambda_a = std::sqrt((1.0 - p) * p / ((1.0 - q) * q));
  const double up = std::pow(lambda, b.A) * lambda_a;      // lambda^(A+a)
  const double down = std::pow(lambda, -b.B) / lambda_a;   // lambda^(-B-a)
  const double em1 = std::sqrt((1.0 - q) * (1.0 - p)) / (2.0 - p - q) *
                     (std::sqrt(q / p) + std::sqrt(p / q));
  return (em1 - down) / (up - down);
}

double etau_asymmetric(const TwoStateChain& chain, Barriers b, double alpha) {
  ensure_valid(Chain{chain});
  ensure_valid(b);
  const double p = chain.p, q = chain.q;
  require_degenerate_free(p, q);

  const double beta = 1.0 - alpha;
  const double em1 = (p - q) / (2.0 - p - q);
  const double stopped = (2.0 - p - q) * (b.A * alpha - b.B * beta) +
                         (p + q - 1.0) * (alpha - beta);
  return 1.0 + (stopped - em1) / (p - q);
}

double ruin_symmetric_delays(double p, double r, Barriers b) {
  SymmetricDelayChain probe{p, 0.0, r};
  ensure_valid(Chain{probe});
  ensure_valid(b);
  const double h = 1.0 / (2.0 - 2.0 * p - r);
  return (b.B - 1.0 + h) / (b.A + b.B - 2.0 + 2.0 * h);
}

double etau_symmetric_delays(const SymmetricDelayChain& chain, Barriers b) {
  ensure_valid(Chain{chain});
  ensure_valid(b);
  const double p = chain.p, q = chain.q, r = chain.r;
  const double motion = 2.0 * p + r;
  if (motion <= 0.0)
    fail(ErrorCode::Domain, "2p + r = 0: the walk never moves, tau is undefined");
  const double u = 1.0 + r - q;
  const double v = 2.0 - 2.0 * p - r;
  return b.A * b.B * u * v / ((1.0 - q) * motion) +
         (b.A + b.B) * (motion - 1.0) * u / ((1.0 - q) * motion) +
         (q - r) * r / ((1.0 - q) * u);
}

double ruin_two_pattern(Barriers b) {
  ensure_valid(b);
  return (b.B - 0.5) / (b.A + b.B);
}

RuinSolution solve(const Chain& chain, Barriers b) {
  ensure_valid(chain);
  ensure_valid(b);
  RuinSolution sol;
  if (const auto* two = std::get_if<TwoStateChain>(&chain)) {
    if (std::abs(two->p - two->q) < kLambdaTol) {
      sol.alpha = ruin_symmetric(two->p, b);
      sol.expected_tau = etau_symmetric(two->p, b);
      sol.method = "closed-form-symmetric";
    } else {
      sol.alpha = ruin_asymmetric(*two, b);
      sol.expected_tau = etau_asymmetric(*two, b, sol.alpha);
      sol.method = "closed-form-asymmetric";
      sol.diagnostics["lambda"] = two->q / two->p;
    }
  } else if (const auto* delay = std::get_if<SymmetricDelayChain>(&chain)) {
    sol.alpha = ruin_symmetric_delays(delay->p, delay->r, b);
    sol.expected_tau = etau_symmetric_delays(*delay, b);
    sol.method = "closed-form-symmetric-delays";
  } else {
    fail(ErrorCode::Domain,
         "no closed form for general chains; use the martingale solver or the oracle");
  }
  sol.beta = 1.0 - sol.alpha;
  return sol;
}

}  // namespace analytic
}  // namespace crw
