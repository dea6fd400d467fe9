#include <doctest.h>

#include <cmath>

#include "crw/errors.hpp"
#include "crw/oracle.hpp"
#include "support.hpp"

using namespace crw;

namespace {

bool bits_equal(const oracle::MonteCarloResult& a, const oracle::MonteCarloResult& b) {
  return a.alpha_hat == b.alpha_hat && a.tau_hat == b.tau_hat &&
         a.stderr_alpha == b.stderr_alpha && a.stderr_tau == b.stderr_tau &&
         a.n_paths == b.n_paths && a.seed == b.seed &&
         a.truncated_paths == b.truncated_paths && a.partitions == b.partitions;
}

}  // namespace

TEST_CASE("simulation statistics land near the exact values") {
  const Chain c{make_two_state(0.5, 0.5)};
  const auto mc = oracle::simulate(c, {3, 2}, 200'000, 42);
  CHECK(mc.truncated_paths == 0);
  CHECK(std::abs(mc.alpha_hat - 0.4) < 4.0 * mc.stderr_alpha);
  CHECK(std::abs(mc.tau_hat - 6.0) < 4.0 * mc.stderr_tau);

  const auto mc2 = oracle::simulate(Chain{testsupport::example_chain()}, {1, 1},
                                    200'000, 7);
  CHECK(std::abs(mc2.alpha_hat - 0.5) < 4.0 * mc2.stderr_alpha);
}

TEST_CASE("same seed, same result, bit for bit") {
  const Chain c{make_symmetric_delay(0.25, 1.0 / 3.0, 0.5)};
  const auto a = oracle::simulate(c, {2, 2}, 50'000, 123);
  const auto b = oracle::simulate(c, {2, 2}, 50'000, 123);
  CHECK(bits_equal(a, b));
  const auto other_seed = oracle::simulate(c, {2, 2}, 50'000, 124);
  CHECK(a.alpha_hat != other_seed.alpha_hat);
}

TEST_CASE("partitioned runs are deterministic and threads do not change them") {
  const Chain c{testsupport::example_chain()};
  const auto four_a = oracle::simulate(c, {2, 3}, 80'000, 99, 1'000'000, 4);
  const auto four_b = oracle::simulate(c, {2, 3}, 80'000, 99, 1'000'000, 4);
  CHECK(bits_equal(four_a, four_b));
  CHECK(four_a.partitions == 4);
  // the partition count is part of the stream contract, so 1 vs 4 differ
  const auto single = oracle::simulate(c, {2, 3}, 80'000, 99, 1'000'000, 1);
  CHECK(single.alpha_hat != four_a.alpha_hat);
  // both are still unbiased estimates of the same alpha
  const double exact = oracle::first_step_alpha(c, {2, 3});
  CHECK(std::abs(four_a.alpha_hat - exact) < 4.0 * four_a.stderr_alpha);
  CHECK(std::abs(single.alpha_hat - exact) < 4.0 * single.stderr_alpha);
}

TEST_CASE("immediate absorption pins tau at one") {
  const auto mc = oracle::simulate(Chain{make_two_state(0.7, 0.4)}, {1, 1}, 10'000, 5);
  CHECK(mc.tau_hat == 1.0);
  CHECK(mc.stderr_tau == 0.0);
}

TEST_CASE("truncation is reported, not raised") {
  // a cap of 1 truncates every path that fails to absorb on the first step
  const auto mc = oracle::simulate(Chain{make_two_state(0.5, 0.5)}, {5, 5}, 10'000, 11, 1);
  CHECK(mc.truncated_paths == 10'000);
  CHECK(std::isnan(mc.alpha_hat));

  const auto partial = oracle::simulate(Chain{make_two_state(0.5, 0.5)}, {1, 5}, 10'000, 11, 1);
  CHECK(partial.truncated_paths > 0);
  CHECK(partial.truncated_paths < 10'000);
  CHECK(partial.alpha_hat == 1.0);  // only up-absorptions happen in one step
  CHECK(partial.tau_hat == 1.0);
}

TEST_CASE("simulation rejects nonsense budgets") {
  const Chain c{make_two_state(0.5, 0.5)};
  CHECK_THROWS_AS(oracle::simulate(c, {1, 1}, 0, 1), Error);
  CHECK_THROWS_AS(oracle::simulate(c, {1, 1}, 10, 1, 0), Error);
  CHECK_THROWS_AS(oracle::simulate(c, {1, 1}, 10, 1, 100, 0), Error);
}
