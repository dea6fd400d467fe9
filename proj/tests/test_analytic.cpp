#include <doctest.h>

#include <cmath>

#include "crw/analytic.hpp"
#include "crw/errors.hpp"
#include "crw/oracle.hpp"
#include "support.hpp"

using namespace crw;

namespace {

// Classical iid asymmetric ruin from a start of 0 with barriers A and -B.
double classical_iid_alpha(double p, int A, int B) {
  const double ratio = (1.0 - p) / p;
  return (1.0 - std::pow(ratio, B)) / (1.0 - std::pow(ratio, A + B));
}

}  // namespace

TEST_CASE("symmetric two-state ruin probability") {
  SUBCASE("iid special case: alpha = B/(A+B)") {
    CHECK(analytic::ruin_symmetric(0.5, {3, 2}) == doctest::Approx(0.4).epsilon(1e-15));
  }
  SUBCASE("equal barriers give 1/2 for every persistence") {
    for (double p : {0.1, 0.25, 0.5, 0.75, 0.9})
      for (int a : {1, 2, 5})
        CHECK(analytic::ruin_symmetric(p, {a, a}) == doctest::Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("hand-evaluated: p=0.25, A=1, B=2 gives 5/7") {
    const double alpha = analytic::ruin_symmetric(0.25, {1, 2});
    CHECK(alpha == doctest::Approx(5.0 / 7.0).epsilon(1e-15));
    const double fs = oracle::first_step_alpha(Chain{make_two_state(0.25, 0.25)}, {1, 2});
    CHECK(std::abs(alpha - fs) < 1e-10);
  }
  SUBCASE("rejects p outside (0,1)") {
    CHECK_THROWS_AS(analytic::ruin_symmetric(0.0, {1, 1}), Error);
    CHECK_THROWS_AS(analytic::ruin_symmetric(1.0, {1, 1}), Error);
  }
  SUBCASE("monotone: increasing in B, decreasing in A") {
    for (double p : {0.2, 0.5, 0.8}) {
      for (int a = 1; a <= 4; ++a)
        for (int b = 1; b <= 4; ++b) {
          CHECK(analytic::ruin_symmetric(p, {a, b + 1}) >
                analytic::ruin_symmetric(p, {a, b}));
          CHECK(analytic::ruin_symmetric(p, {a + 1, b}) <
                analytic::ruin_symmetric(p, {a, b}));
        }
    }
  }
}

TEST_CASE("symmetric two-state expected ruin time") {
  SUBCASE("iid special case: E(tau) = A*B") {
    CHECK(analytic::etau_symmetric(0.5, {3, 2}) == doctest::Approx(6.0).epsilon(1e-15));
  }
  SUBCASE("p -> 1 limit: everything decided by the first step") {
    CHECK(analytic::etau_symmetric(1.0 - 1e-10, {3, 2}) ==
          doctest::Approx(2.5).epsilon(1e-7));
  }
  SUBCASE("matches the first-step oracle") {
    const double formula = analytic::etau_symmetric(0.25, {1, 2});
    const double fs = oracle::first_step_etau(Chain{make_two_state(0.25, 0.25)}, {1, 2});
    CHECK(std::abs(formula - fs) < 1e-10);
  }
}

TEST_CASE("asymmetric two-state ruin probability") {
  SUBCASE("p = 1-q reduces to the classical iid formula") {
    for (double p : {0.2, 0.35, 0.6, 0.9}) {
      const auto chain = make_two_state(p, 1.0 - p);
      for (int a : {1, 2, 4})
        for (int b : {1, 3})
          CHECK(analytic::ruin_asymmetric(chain, {a, b}) ==
                doctest::Approx(classical_iid_alpha(p, a, b)).epsilon(1e-10));
    }
  }
  SUBCASE("p == q is rejected as degenerate") {
    try {
      analytic::ruin_asymmetric(make_two_state(0.4, 0.4), {1, 1});
      FAIL("expected DegenerateLambda");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::DegenerateLambda);
    }
  }
  SUBCASE("matches the first-step oracle from the stationary start") {
    const auto chain = make_two_state(0.5, 0.25);
    const double alpha = analytic::ruin_asymmetric(chain, {2, 2});
    CHECK(std::abs(alpha - oracle::first_step_alpha(Chain{chain}, {2, 2})) < 1e-10);
  }
}

TEST_CASE("asymmetric two-state expected ruin time") {
  SUBCASE("matches the first-step oracle") {
    for (auto [p, q] : {std::pair{0.6, 0.4}, {0.5, 0.25}, {0.2, 0.7}}) {
      const auto chain = make_two_state(p, q);
      for (auto [a, b] : {std::pair{2, 2}, {1, 1}, {3, 2}}) {
        const Barriers barriers{a, b};
        const double alpha = analytic::ruin_asymmetric(chain, barriers);
        const double etau = analytic::etau_asymmetric(chain, barriers, alpha);
        CHECK(std::abs(etau - oracle::first_step_etau(Chain{chain}, barriers)) < 1e-10);
      }
    }
  }
  SUBCASE("substituting back into the stopping identity leaves no residual") {
    const auto chain = make_two_state(0.6, 0.4);
    const double p = chain.p, q = chain.q;
    const Barriers b{2, 3};
    const double alpha = analytic::ruin_asymmetric(chain, b);
    const double etau = analytic::etau_asymmetric(chain, b, alpha);
    const double beta = 1.0 - alpha;
    const double lhs = (p - q) / (2.0 - p - q);
    const double rhs = (2.0 - p - q) * (b.A * alpha - b.B * beta) +
                       (p + q - 1.0) * (alpha - beta) - (p - q) * (etau - 1.0);
    CHECK(std::abs(lhs - rhs) < 1e-12);
  }
}

TEST_CASE("symmetric-delay ruin probability") {
  SUBCASE("r = 0 reduces to the plain symmetric formula") {
    for (double p : {0.1, 0.4, 0.8})
      for (int a : {1, 3})
        for (int b : {2, 5})
          CHECK(analytic::ruin_symmetric_delays(p, 0.0, {a, b}) ==
                doctest::Approx(analytic::ruin_symmetric(p, {a, b})).epsilon(1e-12));
  }
  SUBCASE("2p + r = 1 makes the walk itself a martingale: alpha = B/(A+B)") {
    for (double r : {0.0, 0.2, 0.6}) {
      const double p = (1.0 - r) / 2.0;
      CHECK(analytic::ruin_symmetric_delays(p, r, {3, 2}) ==
            doctest::Approx(0.4).epsilon(1e-12));
    }
  }
  SUBCASE("equal barriers give 1/2") {
    CHECK(analytic::ruin_symmetric_delays(0.3, 0.25, {4, 4}) ==
          doctest::Approx(0.5).epsilon(1e-15));
  }
}

TEST_CASE("symmetric-delay expected ruin time") {
  SUBCASE("2p+r=1 with r=q: E(tau) = A*B/(1-q)") {
    for (double q : {0.1, 0.5, 0.8}) {
      const auto chain = make_symmetric_delay((1.0 - q) / 2.0, q, q);
      CHECK(analytic::etau_symmetric_delays(chain, {2, 3}) ==
            doctest::Approx(6.0 / (1.0 - q)).epsilon(1e-12));
    }
  }
  SUBCASE("r = 0 reduces to the plain symmetric formula for every q") {
    for (double p : {0.2, 0.6})
      for (double q : {0.1, 0.7})
        CHECK(analytic::etau_symmetric_delays(make_symmetric_delay(p, q, 0.0), {2, 4}) ==
              doctest::Approx(analytic::etau_symmetric(p, {2, 4})).epsilon(1e-12));
  }
  SUBCASE("matches the first-step oracle on the worked delay chain") {
    const auto chain = make_symmetric_delay(0.25, 1.0 / 3.0, 0.5);
    const double formula = analytic::etau_symmetric_delays(chain, {1, 1});
    CHECK(std::abs(formula - oracle::first_step_etau(Chain{chain}, {1, 1})) < 1e-10);
  }
  SUBCASE("a walk that never moves is rejected") {
    try {
      analytic::etau_symmetric_delays(make_symmetric_delay(0.0, 0.5, 0.0), {1, 1});
      FAIL("expected Domain");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Domain);
    }
  }
}

TEST_CASE("two-pattern ruin probability") {
  CHECK(analytic::ruin_two_pattern({1, 1}) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(analytic::ruin_two_pattern({2, 3}) == doctest::Approx(0.5).epsilon(1e-15));
  const double fs = oracle::first_step_alpha(Chain{testsupport::pattern_chain()}, {3, 1});
  CHECK(analytic::ruin_two_pattern({3, 1}) == doctest::Approx(fs).epsilon(1e-10));
}

TEST_CASE("closed forms agree with the oracle across a parameter grid") {
  // A reduced grid here; the acceptance suite runs the full one.
  const double probs[] = {0.1, 0.3, 0.5, 0.7, 0.9};
  const int bars[] = {1, 2, 4};

  SUBCASE("symmetric two-state, alpha and etau") {
    for (double p : probs) {
      const Chain c{make_two_state(p, p)};
      for (int a : bars)
        for (int b : bars) {
          CHECK(std::abs(analytic::ruin_symmetric(p, {a, b}) -
                         oracle::first_step_alpha(c, {a, b})) < 1e-9);
          CHECK(std::abs(analytic::etau_symmetric(p, {a, b}) -
                         oracle::first_step_etau(c, {a, b})) < 1e-9);
        }
    }
  }
  SUBCASE("asymmetric two-state, alpha and etau") {
    for (double p : probs)
      for (double q : probs) {
        if (std::abs(p - q) < 0.05) continue;
        const auto chain = make_two_state(p, q);
        const Chain c{chain};
        for (int a : bars)
          for (int b : bars) {
            const double alpha = analytic::ruin_asymmetric(chain, {a, b});
            CHECK(std::abs(alpha - oracle::first_step_alpha(c, {a, b})) < 1e-9);
            CHECK(std::abs(analytic::etau_asymmetric(chain, {a, b}, alpha) -
                           oracle::first_step_etau(c, {a, b})) < 1e-9);
          }
      }
  }
  SUBCASE("symmetric delays, alpha and etau") {
    for (double p : probs)
      for (double q : probs)
        for (double r : probs) {
          if (p + r > 1.0) continue;
          const auto chain = make_symmetric_delay(p, q, r);
          const Chain c{chain};
          for (int a : bars)
            for (int b : bars) {
              CHECK(std::abs(analytic::ruin_symmetric_delays(p, r, {a, b}) -
                             oracle::first_step_alpha(c, {a, b})) < 1e-9);
              CHECK(std::abs(analytic::etau_symmetric_delays(chain, {a, b}) -
                             oracle::first_step_etau(c, {a, b})) < 1e-9);
            }
        }
  }
  SUBCASE("alpha stays inside [0,1] everywhere") {
    for (double p : probs)
      for (double q : probs)
        for (int a : bars)
          for (int b : bars) {
            const double alpha = std::abs(p - q) < 0.05
                                     ? analytic::ruin_symmetric(p, {a, b})
                                     : analytic::ruin_asymmetric(make_two_state(p, q), {a, b});
            CHECK(alpha >= 0.0);
            CHECK(alpha <= 1.0);
          }
  }
}

TEST_CASE("bundled solve fills a consistent RuinSolution") {
  SUBCASE("two-state symmetric routes to the symmetric forms") {
    const auto sol = analytic::solve(Chain{make_two_state(0.5, 0.5)}, {3, 2});
    CHECK(sol.method == "closed-form-symmetric");
    CHECK(sol.alpha == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(*sol.expected_tau == doctest::Approx(6.0).epsilon(1e-15));
    CHECK(sol.alpha + sol.beta == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("two-state asymmetric routes to the lambda branch") {
    const auto sol = analytic::solve(Chain{make_two_state(0.6, 0.4)}, {2, 2});
    CHECK(sol.method == "closed-form-asymmetric");
    CHECK(sol.diagnostics.at("lambda") == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  }
  SUBCASE("general chains have no closed form") {
    CHECK_THROWS_AS(analytic::solve(Chain{testsupport::example_chain()}, {1, 1}), Error);
  }
}
