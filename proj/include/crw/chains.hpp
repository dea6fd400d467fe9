#pragma once

#include <array>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace crw {

// Absolute tolerance for probability comparisons; everything here is O(1).
inline constexpr double kProbTol = 1e-12;

// Law of the first increment over states (1, -1).
struct InitialDist2 {
  double up = 0.5;    // P(X_1 = 1)
  double down = 0.5;  // P(X_1 = -1)
};

// Law of the first increment over states (1, 0, -1).
struct InitialDist3 {
  double up = 0.0;
  double mid = 1.0;
  double down = 0.0;
};

// Two-state increment chain on {1, -1}:
//   row  1: (p, 1-p)
//   row -1: (1-q, q)
// with 0 < p, q < 1 (strict).
struct TwoStateChain {
  double p = 0.5;  // P(1 -> 1)
  double q = 0.5;  // P(-1 -> -1)
  InitialDist2 initial{};
};

// Symmetric three-state increment chain on {1, 0, -1}:
//   row  1: (p, r, 1-p-r)
//   row  0: ((1-q)/2, q, (1-q)/2)
//   row -1: (1-p-r, r, p)
// with 0 <= p, q, r < 1 and p + r <= 1. The walk always starts from the
// stationary distribution; there is no initial-law field on purpose.
struct SymmetricDelayChain {
  double p = 0.25;
  double q = 0.25;
  double r = 0.25;
};

// General three-state increment chain on {1, 0, -1}:
//   row  1: (p, p0, 1-p-p0)
//   row  0: (r1, r, 1-r-r1)
//   row -1: (1-q-q0, q0, q)
// with all parameters in [0, 1] and each pair summing to at most 1.
struct GeneralChain {
  double p = 1.0 / 3, p0 = 1.0 / 3;
  double r1 = 1.0 / 3, r = 1.0 / 3;
  double q = 1.0 / 3, q0 = 1.0 / 3;
  InitialDist3 initial{};

  std::array<std::array<double, 3>, 3> matrix() const;
};

using Chain = std::variant<TwoStateChain, SymmetricDelayChain, GeneralChain>;

// Factories; the ones without an explicit start use the stationary law.
TwoStateChain make_two_state(double p, double q);
TwoStateChain make_two_state(double p, double q, double initial_up);
SymmetricDelayChain make_symmetric_delay(double p, double q, double r);
GeneralChain make_general(const std::array<std::array<double, 3>, 3>& matrix,
                          const InitialDist3& initial);
GeneralChain make_general_stationary(const std::array<std::array<double, 3>, 3>& matrix);

// All invariants checked, violations returned by name (never thrown).
std::vector<std::string> validate(const TwoStateChain& c);
std::vector<std::string> validate(const SymmetricDelayChain& c);
std::vector<std::string> validate(const GeneralChain& c);
std::vector<std::string> validate(const Chain& c);

// Throws Error(Domain) listing every violation.
void ensure_valid(const Chain& c);

// Stationary laws. The two-state and symmetric-delay forms are closed-form;
// the general one is a 3x3 linear solve and throws Error(Reducible) when the
// chain has no unique stationary vector.
InitialDist2 stationary_two_state(const TwoStateChain& c);
InitialDist3 stationary_delay(const SymmetricDelayChain& c);
InitialDist3 stationary_general(const GeneralChain& c);
std::vector<double> stationary(const Chain& c);

// Three-state embeddings. State 0 is unreachable for embedded two-state
// chains; its transition row is fixed to (1/2, 0, 1/2).
GeneralChain embed(const TwoStateChain& c);
GeneralChain embed(const SymmetricDelayChain& c);

// Uniform stepping view shared by the oracle, the enumerator and the
// simulator. States are ordered (1, -1) or (1, 0, -1).
struct IncrementKernel {
  std::vector<int> states;
  std::vector<std::vector<double>> rows;  // rows[i][j] = P(states[j] | states[i])
  std::vector<double> initial;            // P(X_1 = states[j])
};

IncrementKernel kernel(const Chain& c);
IncrementKernel kernel(const Chain& c, std::span<const double> initial);

int num_states(const Chain& c);

}  // namespace crw
