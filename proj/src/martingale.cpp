#include "crw/martingale.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "crw/errors.hpp"
#include "crw/linalg.hpp"

namespace crw::martingale {

namespace {

constexpr double kDriftTol = 1e-9;
constexpr double kRootResidualTol = 1e-10;
constexpr double kTrivialRootGap = 1e-6;
constexpr double kAlphaAgreementTol = 1e-9;

// Conditional step means mu(s) and second moments nu(s) for s = 1, 0, -1.
struct ConditionalMoments {
  double mu[3];
  double nu[3];
};

ConditionalMoments moments(const GeneralChain& c) {
  const auto m = c.matrix();
  ConditionalMoments cm{};
  for (int i = 0; i < 3; ++i) {
    cm.mu[i] = m[i][0] - m[i][2];
    cm.nu[i] = m[i][0] + m[i][2];
  }
  return cm;
}

// Expands f(1), f(0), f(-1) into coefficients of 1, s, s^2.
void to_poly(const double f[3], double& c0, double& c1, double& c2) {
  c0 = f[1];
  c1 = (f[0] - f[2]) / 2.0;
  c2 = (f[0] + f[2]) / 2.0 - f[1];
}

}  // namespace

DriftCoefficients drift_coefficients(const Chain& chain) {
  ensure_valid(chain);
  DriftCoefficients d;
  if (const auto* two = std::get_if<TwoStateChain>(&chain)) {
    d.intercept = two->p - two->q;
    d.slope = two->p + two->q - 1.0;
    return d;
  }
  const GeneralChain g = std::holds_alternative<SymmetricDelayChain>(chain)
                             ? embed(std::get<SymmetricDelayChain>(chain))
                             : std::get<GeneralChain>(chain);
  const auto cm = moments(g);
  to_poly(cm.mu, d.intercept, d.slope, d.quad);
  to_poly(cm.nu, d.sq_intercept, d.sq_slope, d.sq_quad);
  return d;
}

QuadraticCoeffs quadratic_coeffs_two_state(double p) {
  if (!std::isfinite(p) || !(p > 0.0 && p < 1.0))
    fail(ErrorCode::Domain, "p must lie in (0,1)");
  return {(2.0 * p - 1.0) / (1.0 - p), 0.0, p / (1.0 - p)};
}

QuadraticCoeffs quadratic_coeffs_delay(const SymmetricDelayChain& chain) {
  ensure_valid(Chain{chain});
  const double p = chain.p, q = chain.q, r = chain.r;
  const double v = 2.0 - 2.0 * p - r;
  const double u = 1.0 + r - q;
  return {2.0 * (2.0 * p + r - 1.0) / v,
          (q - r) * (2.0 * p + r) / (u * v),
          (1.0 - q) * (2.0 * p + r) / (u * v)};
}

double stationary_drift(const GeneralChain& chain) {
  const auto pi = stationary_general(chain);
  const auto cm = moments(chain);
  return pi.up * cm.mu[0] + pi.mid * cm.mu[1] + pi.down * cm.mu[2];
}

AdditiveCoeffs additive_coeffs(const GeneralChain& chain) {
  ensure_valid(Chain{chain});
  const auto cm = moments(chain);
  // One equation per predecessor state s in {1, 0, -1}:
  //   a2 (nu(s) - s^2) + a1 (mu(s) - s) - c = -mu(s)
  std::vector<double> a(9), rhs(3);
  const double svals[3] = {1.0, 0.0, -1.0};
  for (int i = 0; i < 3; ++i) {
    a[i * 3 + 0] = cm.nu[i] - svals[i] * svals[i];
    a[i * 3 + 1] = cm.mu[i] - svals[i];
    a[i * 3 + 2] = -1.0;
    rhs[i] = -cm.mu[i];
  }
  std::vector<double> x;
  try {
    x = linalg::solve(a, rhs);
  } catch (const Error&) {
    std::ostringstream msg;
    msg << "additive martingale system is singular; matrix rows:";
    for (int i = 0; i < 3; ++i)
      msg << " [" << a[i * 3] << ", " << a[i * 3 + 1] << ", " << a[i * 3 + 2] << "]";
    fail(ErrorCode::Singular, msg.str());
  }
  return {x[0], x[1], x[2]};
}

namespace {

// The defining system of the exponential martingale in (x, y, z) =
// (lambda, lambda^a, lambda^b); each row states that the conditional
// expectation of the one-step multiplier equals 1.
struct ExponentialSystem {
  double p, p0, p1m;
  double r1, r, rm;
  double qm, q0, q;

  explicit ExponentialSystem(const GeneralChain& c)
      : p(c.p), p0(c.p0), p1m(1.0 - c.p - c.p0),
        r1(c.r1), r(c.r), rm(1.0 - c.r - c.r1),
        qm(1.0 - c.q - c.q0), q0(c.q0), q(c.q) {}

  void residual(const double v[3], double f[3]) const {
    const double x = v[0], y = v[1], z = v[2];
    f[0] = p * x + p0 / (y * z) + p1m / (z * z * x) - 1.0;
    f[1] = r1 * x * y * z + r + rm * y / (x * z) - 1.0;
    f[2] = qm * z * z * x + q0 * z / y + q / x - 1.0;
  }

  double residual_inf(const double v[3]) const {
    double f[3];
    residual(v, f);
    return std::max({std::abs(f[0]), std::abs(f[1]), std::abs(f[2])});
  }

  void jacobian(const double v[3], double j[9]) const {
    const double x = v[0], y = v[1], z = v[2];
    j[0] = p - p1m / (z * z * x * x);
    j[1] = -p0 / (y * y * z);
    j[2] = -p0 / (y * z * z) - 2.0 * p1m / (z * z * z * x);
    j[3] = r1 * y * z - rm * y / (x * x * z);
    j[4] = r1 * x * z + rm / (x * z);
    j[5] = r1 * x * y - rm * y / (x * z * z);
    j[6] = qm * z * z - q / (x * x);
    j[7] = -q0 * z / (y * y);
    j[8] = 2.0 * qm * z * x + q0 / y;
  }
};

struct NewtonOutcome {
  bool converged = false;
  double v[3] = {1.0, 1.0, 1.0};
  double residual = 0.0;
  int iterations = 0;
};

NewtonOutcome newton(const ExponentialSystem& sys, const double start[3]) {
  NewtonOutcome out;
  out.v[0] = start[0];
  out.v[1] = start[1];
  out.v[2] = start[2];
  double fnorm = sys.residual_inf(out.v);

  for (int it = 0; it < 100; ++it) {
    out.iterations = it;
    if (fnorm < 1e-15) break;
    double f[3], j[9];
    sys.residual(out.v, f);
    sys.jacobian(out.v, j);
    std::vector<double> step;
    try {
      step = linalg::solve({j, j + 9}, {-f[0], -f[1], -f[2]});
    } catch (const Error&) {
      return out;  // singular Jacobian: give up on this start
    }

    // Backtracking: stay strictly positive and insist on actual decrease.
    double t = 1.0;
    bool moved = false;
    for (int half = 0; half < 50; ++half, t *= 0.5) {
      double cand[3] = {out.v[0] + t * step[0], out.v[1] + t * step[1],
                        out.v[2] + t * step[2]};
      if (cand[0] <= 1e-12 || cand[1] <= 1e-12 || cand[2] <= 1e-12) continue;
      const double cnorm = sys.residual_inf(cand);
      if (cnorm < fnorm) {
        out.v[0] = cand[0];
        out.v[1] = cand[1];
        out.v[2] = cand[2];
        fnorm = cnorm;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  out.residual = fnorm;
  out.converged = fnorm < kRootResidualTol;
  return out;
}

bool same_root(const MartingaleParams& a, const NewtonOutcome& b) {
  return std::abs(a.x - b.v[0]) < 1e-6 && std::abs(a.y - b.v[1]) < 1e-6 &&
         std::abs(a.z - b.v[2]) < 1e-6;
}

// --- spectral fallback ------------------------------------------------------
//
// M_n = lambda^(S_n + a X_n^2 + b X_n) is lambda^(S_n) * phi(X_n) with
// phi(s) = lambda^(a s^2 + b s), and the martingale condition says phi is a
// positive eigenvector of the tilted matrix T(lambda)_ij = P_ij lambda^(s_j)
// at eigenvalue 1. Nontrivial bases are therefore roots of
// d(lambda) = det(I - T(lambda)), which is cheap to scan and bisect when the
// Newton ladder walks into the trivial root from every start.

void tilted(const GeneralChain& c, double lambda, double t[9]) {
  const auto m = c.matrix();
  const double powers[3] = {lambda, 1.0, 1.0 / lambda};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t[i * 3 + j] = m[i][j] * powers[j];
}

double det_i_minus_t(const GeneralChain& c, double lambda) {
  double t[9];
  tilted(c, lambda, t);
  double a[9];
  for (int i = 0; i < 9; ++i) a[i] = -t[i];
  a[0] += 1.0;
  a[4] += 1.0;
  a[8] += 1.0;
  return a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6]) +
         a[2] * (a[3] * a[7] - a[4] * a[6]);
}

// Null vector of (T - I) via the adjugate; positive only when 1 is the
// Perron eigenvalue, which is exactly the case the martingale needs.
bool eigenvector_at_one(const GeneralChain& c, double lambda, double phi[3]) {
  double t[9];
  tilted(c, lambda, t);
  double a[9];
  for (int i = 0; i < 9; ++i) a[i] = t[i];
  a[0] -= 1.0;
  a[4] -= 1.0;
  a[8] -= 1.0;
  // adjugate columns are null vectors of a rank-2 matrix
  const double adj[9] = {
      a[4] * a[8] - a[5] * a[7], -(a[1] * a[8] - a[2] * a[7]), a[1] * a[5] - a[2] * a[4],
      -(a[3] * a[8] - a[5] * a[6]), a[0] * a[8] - a[2] * a[6], -(a[0] * a[5] - a[2] * a[3]),
      a[3] * a[7] - a[4] * a[6], -(a[0] * a[7] - a[1] * a[6]), a[0] * a[4] - a[1] * a[3]};
  int best = 0;
  double best_norm = -1.0;
  for (int j = 0; j < 3; ++j) {
    const double norm = std::abs(adj[j]) + std::abs(adj[3 + j]) + std::abs(adj[6 + j]);
    if (norm > best_norm) {
      best_norm = norm;
      best = j;
    }
  }
  if (best_norm <= 0.0) return false;
  for (int i = 0; i < 3; ++i) phi[i] = adj[i * 3 + best];
  if (phi[1] < 0.0) {
    phi[0] = -phi[0];
    phi[1] = -phi[1];
    phi[2] = -phi[2];
  }
  return phi[0] > 0.0 && phi[1] > 0.0 && phi[2] > 0.0;
}

std::vector<double> spectral_lambda_candidates(const GeneralChain& c) {
  std::vector<double> found;
  const double lo = std::log(1e-4), hi = std::log(1e4);
  const int samples = 800;
  double prev_lambda = std::exp(lo);
  double prev_d = det_i_minus_t(c, prev_lambda);
  for (int i = 1; i <= samples; ++i) {
    const double lambda = std::exp(lo + (hi - lo) * i / samples);
    const double d = det_i_minus_t(c, lambda);
    const bool spans_trivial = prev_lambda <= 1.0 && lambda >= 1.0;
    if (!spans_trivial && prev_d != 0.0 && d != 0.0 && (prev_d < 0.0) != (d < 0.0)) {
      double a = prev_lambda, b = lambda, da = prev_d;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        const double dm = det_i_minus_t(c, mid);
        if (dm == 0.0) {
          a = b = mid;
          break;
        }
        if ((dm < 0.0) == (da < 0.0)) {
          a = mid;
          da = dm;
        } else {
          b = mid;
        }
      }
      found.push_back(0.5 * (a + b));
    }
    prev_lambda = lambda;
    prev_d = d;
  }
  return found;
}

std::vector<NewtonOutcome> spectral_fallback(const GeneralChain& c,
                                             const ExponentialSystem& sys) {
  std::vector<NewtonOutcome> out;
  for (double lambda : spectral_lambda_candidates(c)) {
    if (std::abs(lambda - 1.0) <= 10.0 * kTrivialRootGap) continue;
    double phi[3];
    if (!eigenvector_at_one(c, lambda, phi)) continue;
    // normalize phi(0) = 1; then phi(1) = y z and phi(-1) = y / z
    const double up = phi[0] / phi[1], down = phi[2] / phi[1];
    const double seed[3] = {lambda, std::sqrt(up * down), std::sqrt(up / down)};
    NewtonOutcome polished = newton(sys, seed);
    if (polished.converged) out.push_back(polished);
  }
  return out;
}

std::vector<MartingaleParams> find_roots(const GeneralChain& chain) {
  ensure_valid(Chain{chain});
  const double drift = stationary_drift(chain);
  if (std::abs(drift) < kDriftTol)
    fail(ErrorCode::DegenerateDrift,
         "zero-drift chain: only the trivial root x = 1 exists; "
         "use the additive martingale");

  const ExponentialSystem sys(chain);
  std::vector<MartingaleParams> roots;
  double best_residual = std::numeric_limits<double>::infinity();

  auto admit = [&](const NewtonOutcome& res, int start_index) {
    if (!res.converged) return;
    if (res.v[0] <= 0.0 || std::abs(res.v[0] - 1.0) <= kTrivialRootGap) return;
    for (const auto& known : roots)
      if (same_root(known, res)) return;
    MartingaleParams mp;
    mp.x = res.v[0];
    mp.y = res.v[1];
    mp.z = res.v[2];
    mp.lambda = mp.x;
    mp.a = std::log(mp.y) / std::log(mp.x);
    mp.b = std::log(mp.z) / std::log(mp.x);
    mp.residual = res.residual;
    mp.iterations = res.iterations;
    mp.start_index = start_index;
    roots.push_back(mp);
  };

  int start_index = 0;
  for (int i = 1; i <= 30; ++i, ++start_index) {
    const double x0 = 0.1 * i;
    if (std::abs(x0 - 1.0) <= kTrivialRootGap) continue;
    const double start[3] = {x0, 1.0, 1.0};
    const auto res = newton(sys, start);
    if (!res.converged) best_residual = std::min(best_residual, res.residual);
    admit(res, start_index);
  }

  // When every ladder start slides into the trivial root, locate the base as
  // a unit eigenvalue of the tilted transition matrix and polish from there.
  if (roots.empty()) {
    for (const auto& res : spectral_fallback(chain, sys)) admit(res, start_index++);
  }

  if (roots.empty()) {
    std::ostringstream msg;
    msg << "no nontrivial root found by the Newton ladder or the spectral scan "
        << "(best residual " << best_residual << ")";
    fail(ErrorCode::NoConvergence, msg.str());
  }
  return roots;
}

double alpha_from_root(const MartingaleParams& mp, const InitialDist3& init, Barriers b) {
  // lambda^(s + a s^2 + b s) at s = 1, 0, -1 is xyz, 1, y/(xz).
  const double em1 = init.up * (mp.x * mp.y * mp.z) + init.mid +
                     init.down * (mp.y / (mp.x * mp.z));
  const double up = std::pow(mp.x, b.A) * mp.y * mp.z;
  const double down = std::pow(mp.x, -b.B) * mp.y / mp.z;
  if (std::abs(up - down) < 1e-300)
    fail(ErrorCode::NoConvergence, "exponential martingale cannot separate the barriers");
  return (em1 - down) / (up - down);
}

}  // namespace

MartingaleParams solve_exponential(const GeneralChain& chain) {
  return find_roots(chain).front();
}

std::vector<MartingaleParams> solve_exponential_all(const GeneralChain& chain) {
  return find_roots(chain);
}

RuinSolution ruin_general(const GeneralChain& chain, Barriers b) {
  ensure_valid(Chain{chain});
  ensure_valid(b);
  const double drift = stationary_drift(chain);

  RuinSolution sol;
  if (std::abs(drift) < kDriftTol) {
    // Zero drift: the compensator of the additive martingale vanishes and
    // M_n = S_n + a2 X_n^2 + a1 X_n is bounded up to tau, so optional
    // stopping gives alpha directly.
    const auto ac = additive_coeffs(chain);
    auto value = [&](double s) { return s + ac.a2 * s * s + ac.a1 * s; };
    const double em1 = chain.initial.up * value(1.0) + chain.initial.mid * value(0.0) +
                       chain.initial.down * value(-1.0);
    const double up = b.A + ac.a2 + ac.a1;
    const double down = -b.B + ac.a2 - ac.a1;
    if (std::abs(up - down) < 1e-12)
      fail(ErrorCode::Singular, "additive martingale cannot separate the barriers");
    sol.alpha = (em1 - down) / (up - down);
    sol.method = "additive-martingale";
    sol.diagnostics = {{"a2", ac.a2}, {"a1", ac.a1}, {"c", ac.c},
                       {"e_m1", em1}, {"drift", drift}};
  } else {
    const auto roots = solve_exponential_all(chain);
    std::vector<double> alphas;
    alphas.reserve(roots.size());
    for (const auto& root : roots) alphas.push_back(alpha_from_root(root, chain.initial, b));
    const auto [lo, hi] = std::minmax_element(alphas.begin(), alphas.end());
    if (*hi - *lo > kAlphaAgreementTol) {
      std::ostringstream msg;
      msg << "distinct martingale roots disagree on alpha (" << *lo << " vs " << *hi
          << "); optional stopping forbids this, so the solver is wrong";
      fail(ErrorCode::Internal, msg.str());
    }
    const auto& mp = roots.front();
    const double em1 = chain.initial.up * (mp.x * mp.y * mp.z) + chain.initial.mid +
                       chain.initial.down * (mp.y / (mp.x * mp.z));
    sol.alpha = alphas.front();
    sol.method = "exponential-martingale";
    sol.diagnostics = {{"lambda", mp.lambda}, {"a", mp.a},       {"b", mp.b},
                       {"x", mp.x},           {"y", mp.y},       {"z", mp.z},
                       {"residual", mp.residual},
                       {"iterations", static_cast<double>(mp.iterations)},
                       {"e_m1", em1},         {"drift", drift},
                       {"n_roots", static_cast<double>(roots.size())}};
  }
  sol.beta = 1.0 - sol.alpha;
  return sol;
}

}  // namespace crw::martingale
