#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace crw {

// Absorbing barriers: the walk stops on reaching +A or -B dollars.
struct Barriers {
  int A = 1;  // upper barrier
  int B = 1;  // lower barrier magnitude
};

std::vector<std::string> validate(const Barriers& b);
void ensure_valid(const Barriers& b);

// A solved ruin problem. beta is always 1 - alpha; expected_tau is present
// only when the producing method computes it. diagnostics carries numeric
// side-channel data (residuals, solver iterations, martingale parameters).
struct RuinSolution {
  double alpha = 0.0;
  double beta = 0.0;
  std::optional<double> expected_tau;
  std::string method;
  std::map<std::string, double> diagnostics;
};

}  // namespace crw
